#include "laf/graph.hpp"

#include "laf/error.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

namespace laf {

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace

CyclicSupport::CyclicSupport(std::vector<std::string> cycle)
    : Error("support cycle in argumentation graph: " + join(cycle, " -> ")), cycle_(std::move(cycle)) {}

const INode* ArgGraph::find(std::string_view key) const {
    auto it = inode_index_.find(key);
    return it == inode_index_.end() ? nullptr : &inodes_[it->second];
}

const RANode* ArgGraph::find_ra(std::string_view key) const {
    auto it = ra_index_.find(key);
    return it == ra_index_.end() ? nullptr : &ranodes_[it->second];
}

std::vector<const RANode*> ArgGraph::incoming_ra(std::string_view key) const {
    std::vector<const RANode*> out;
    if (auto it = incoming_.find(key); it != incoming_.end())
        for (auto i : it->second) out.push_back(&ranodes_[i]);
    return out;
}

std::optional<std::string> ArgGraph::complement_of(std::string_view key) const {
    auto it = complement_.find(key);
    if (it == complement_.end()) return std::nullopt;
    return it->second;
}

void ArgGraph::index() {
    std::sort(inodes_.begin(), inodes_.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
    std::sort(ranodes_.begin(), ranodes_.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
    inode_index_.clear();
    ra_index_.clear();
    incoming_.clear();
    complement_.clear();
    canodes_.clear();
    for (std::size_t i = 0; i < inodes_.size(); ++i) inode_index_.emplace(inodes_[i].key, i);
    for (std::size_t i = 0; i < ranodes_.size(); ++i) {
        ra_index_.emplace(ranodes_[i].key, i);
        incoming_[ranodes_[i].conclusion].push_back(i);
    }
    for (const auto& n : inodes_) {
        if (!n.literal) continue;
        auto other = n.literal->complement().key();
        if (!inode_index_.count(other)) continue;
        complement_.emplace(n.key, other);
        if (n.key < other) canodes_.push_back({"CA:" + n.key, n.key, other});
    }
}

std::vector<std::string> ArgGraph::topological_order() const {
    // Nodes: I-nodes [0, m), RA-nodes [m, m + t).
    const std::size_t m = inodes_.size();
    std::vector<std::vector<std::size_t>> succ(m + ranodes_.size());
    std::vector<std::size_t> indeg(succ.size(), 0);
    for (std::size_t r = 0; r < ranodes_.size(); ++r) {
        for (const auto& p : ranodes_[r].premises) {
            succ[inode_index_.find(p)->second].push_back(m + r);
            ++indeg[m + r];
        }
        succ[m + r].push_back(inode_index_.find(ranodes_[r].conclusion)->second);
        ++indeg[inode_index_.find(ranodes_[r].conclusion)->second];
    }
    // Min-heap over node index gives key order among ready I-nodes.
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < succ.size(); ++i)
        if (indeg[i] == 0) ready.push(i);
    std::vector<std::string> order;
    std::size_t seen = 0;
    while (!ready.empty()) {
        auto v = ready.top();
        ready.pop();
        ++seen;
        if (v < m) order.push_back(inodes_[v].key);
        for (auto w : succ[v])
            if (--indeg[w] == 0) ready.push(w);
    }
    if (seen == succ.size()) return order;

    // Every unvisited node has an unvisited predecessor; walk back to a repeat.
    std::vector<std::vector<std::size_t>> pred(succ.size());
    for (std::size_t v = 0; v < succ.size(); ++v)
        for (auto w : succ[v]) pred[w].push_back(v);
    std::size_t start = 0;
    while (indeg[start] == 0) ++start;
    std::vector<std::size_t> walk;
    std::vector<int> pos(succ.size(), -1);
    std::size_t v = start;
    while (pos[v] < 0) {
        pos[v] = static_cast<int>(walk.size());
        walk.push_back(v);
        for (auto p : pred[v])
            if (indeg[p] > 0) {
                v = p;
                break;
            }
    }
    std::vector<std::string> cycle;
    for (auto i = walk.size(); i-- > static_cast<std::size_t>(pos[v]);)
        cycle.push_back(walk[i] < m ? inodes_[walk[i]].key : ranodes_[walk[i] - m].key);
    cycle.push_back(cycle.front());
    throw CyclicSupport(cycle);
}

std::string ArgGraph::serialize() const {
    std::ostringstream os;
    for (const auto& n : inodes_) {
        os << "I " << n.key << (n.kind == INodeKind::RuleInstance ? " rule" : " literal");
        if (n.valuation) os << " F=" << format_valuation(*n.valuation);
        os << "\n";
    }
    for (const auto& r : ranodes_) os << "RA " << r.key << " : " << join(r.premises, ", ") << " -> " << r.conclusion << "\n";
    for (const auto& c : canodes_) os << "CA " << c.key << " : " << c.first << " <-> " << c.second << "\n";
    return os.str();
}

ArgGraph build_graph(const KnowledgeBase& kb) {
    if (!kb.is_ground()) throw Error("build_graph requires a ground knowledge base");

    ArgGraph g;
    std::map<std::string, std::size_t> literal_node;  // key -> inodes_ index
    auto add_literal = [&](const Literal& lit) -> INode& {
        auto key = lit.key();
        auto it = literal_node.find(key);
        if (it != literal_node.end()) return g.inodes_[it->second];
        literal_node.emplace(key, g.inodes_.size());
        g.inodes_.push_back({key, lit.str(), INodeKind::Literal, lit, std::nullopt});
        return g.inodes_.back();
    };

    // Presence fixpoint: a rule applies once all distinct premises are present.
    std::vector<const LabeledFormula*> rules;
    std::map<std::string, std::vector<std::size_t>> waiting;
    std::vector<std::size_t> missing;
    std::queue<std::string> agenda;
    std::set<std::string> present;
    auto make_present = [&](const Literal& lit) {
        if (present.insert(lit.key()).second) agenda.push(lit.key());
    };
    for (const auto& f : kb.formulas) {
        if (f.is_rule()) {
            std::set<std::string> distinct;
            for (const auto& p : f.rule()->premises) distinct.insert(p.key());
            for (const auto& k : distinct) waiting[k].push_back(rules.size());
            missing.push_back(distinct.size());
            rules.push_back(&f);
        } else {
            auto& node = add_literal(f.conclusion());
            node.valuation = f.valuation;
            make_present(f.conclusion());
        }
    }
    std::vector<bool> applied(rules.size(), false);
    while (!agenda.empty()) {
        auto key = agenda.front();
        agenda.pop();
        auto it = waiting.find(key);
        if (it == waiting.end()) continue;
        for (auto ri : it->second) {
            if (--missing[ri] != 0) continue;
            applied[ri] = true;
            make_present(rules[ri]->rule()->head);
        }
    }

    for (std::size_t ri = 0; ri < rules.size(); ++ri) {
        const auto& f = *rules[ri];
        if (!applied[ri]) {
            g.diagnostics_.push_back("rule '" + f.id + "' has premises that are not established; no RA-node");
            continue;
        }
        const auto& r = *f.rule();
        RANode ra;
        ra.key = "RA:" + f.id;
        for (const auto& p : r.premises) {
            add_literal(p);
            ra.premises.push_back(p.key());
        }
        ra.premises.push_back(f.id);
        add_literal(r.head);
        ra.conclusion = r.head.key();
        g.inodes_.push_back({f.id, f.id, INodeKind::RuleInstance, std::nullopt, f.valuation});
        g.ranodes_.push_back(std::move(ra));
    }
    g.index();
    g.topological_order();  // throws CyclicSupport
    return g;
}

ArgumentView argument_for(const ArgGraph& g, const Literal& claim) {
    auto key = claim.key();
    if (!g.find(key)) throw UnknownClaim(claim.str());
    ArgumentView view;
    view.conclusion = key;
    std::vector<std::string> stack{key};
    view.inodes.insert(key);
    while (!stack.empty()) {
        auto k = stack.back();
        stack.pop_back();
        for (const auto* ra : g.incoming_ra(k)) {
            view.ranodes.insert(ra->key);
            for (const auto& p : ra->premises)
                if (view.inodes.insert(p).second) stack.push_back(p);
        }
    }
    return view;
}

}  // namespace laf
