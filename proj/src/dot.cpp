#include "laf/dot.hpp"

#include <cstdio>
#include <set>
#include <sstream>

namespace laf {

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

std::string export_dot(const ArgGraph& g, const LabelingSolution* sol, const EquationSystem* sys) {
    if (g.empty()) return "digraph laf { }\n";

    std::size_t attributes = 0;
    if (sys) {
        attributes = sys->attribute_count();
    } else if (sol) {
        std::set<std::size_t> seen;
        for (const auto& [v, x] : sol->assignment) seen.insert(v.attribute);
        attributes = seen.size();
    }
    auto attr_label = [&](std::size_t i) {
        return sys && i < sys->attribute_labels.size() ? sys->attribute_labels[i] : "a" + std::to_string(i);
    };

    std::ostringstream os;
    os << "digraph laf {\n  rankdir=BT;\n";
    for (const auto& n : g.inodes()) {
        std::string label = n.label;
        if (sol) {
            for (std::size_t i = 0; i < attributes; ++i) {
                auto acc = sol->assignment.find({VarKind::Acc, i, n.key});
                auto weak = sol->assignment.find({VarKind::Weak, i, n.key});
                if (acc == sol->assignment.end() || weak == sol->assignment.end()) continue;
                label += "\n" + attr_label(i) + ": " + short_number(acc->second) + " / " + short_number(weak->second);
            }
        }
        std::string escaped;
        for (char c : label) escaped += c == '\n' ? std::string("\\n") : std::string(1, c);
        os << "  " << quote("I:" + n.key) << " [shape=box, label=\"";
        for (char c : escaped) {
            if (c == '"') os << '\\';
            os << c;
        }
        os << "\"];\n";
    }
    for (const auto& r : g.ranodes())
        os << "  " << quote(r.key) << " [shape=ellipse, label=" << quote(r.key.substr(3)) << "];\n";
    for (const auto& c : g.canodes()) os << "  " << quote(c.key) << " [shape=diamond, label=\"CA\"];\n";
    for (const auto& r : g.ranodes()) {
        for (const auto& p : r.premises) os << "  " << quote("I:" + p) << " -> " << quote(r.key) << ";\n";
        os << "  " << quote(r.key) << " -> " << quote("I:" + r.conclusion) << ";\n";
    }
    for (const auto& c : g.canodes()) {
        os << "  " << quote("I:" + c.first) << " -> " << quote(c.key) << ";\n";
        os << "  " << quote(c.key) << " -> " << quote("I:" + c.second) << ";\n";
        os << "  " << quote("I:" + c.second) << " -> " << quote(c.key) << ";\n";
        os << "  " << quote(c.key) << " -> " << quote("I:" + c.first) << ";\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace laf
