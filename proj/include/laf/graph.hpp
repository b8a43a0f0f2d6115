#pragma once

#include "laf/kb.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace laf {

enum class INodeKind { Literal, RuleInstance };

struct INode {
    std::string key;      ///< canonical key (Literal::key or rule instance id)
    std::string label;    ///< display text (Literal::str or rule instance id)
    INodeKind kind = INodeKind::Literal;
    std::optional<Literal> literal;
    /// F(X); present iff X belongs to the knowledge base (presumption or rule instance).
    std::optional<Valuation> valuation;
};

struct RANode {
    std::string key;                     ///< "RA:" + rule instance id
    std::vector<std::string> premises;   ///< literal premises in rule order, rule-instance I-node last
    std::string conclusion;
};

struct CANode {
    std::string key;    ///< "CA:" + first
    std::string first;  ///< lexicographically smaller key of the pair
    std::string second;
};

class ArgGraph {
public:
    const std::vector<INode>& inodes() const { return inodes_; }
    const std::vector<RANode>& ranodes() const { return ranodes_; }
    const std::vector<CANode>& canodes() const { return canodes_; }
    const std::vector<std::string>& diagnostics() const { return diagnostics_; }

    bool empty() const { return inodes_.empty(); }
    const INode* find(std::string_view key) const;
    const INode* find(const Literal& lit) const { return find(lit.key()); }
    const RANode* find_ra(std::string_view key) const;

    /// RA-nodes concluding in `key`, sorted by RA key.
    std::vector<const RANode*> incoming_ra(std::string_view key) const;
    /// Key of the complementary I-node if both are present.
    std::optional<std::string> complement_of(std::string_view key) const;

    /// I-node keys in a topological order of the CA-free graph (ties by key).
    std::vector<std::string> topological_order() const;

    /// Canonical line-oriented text form.
    std::string serialize() const;

private:
    friend ArgGraph build_graph(const KnowledgeBase& kb);

    void index();

    std::vector<INode> inodes_;
    std::vector<RANode> ranodes_;
    std::vector<CANode> canodes_;
    std::vector<std::string> diagnostics_;
    std::map<std::string, std::size_t, std::less<>> inode_index_;
    std::map<std::string, std::size_t, std::less<>> ra_index_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> incoming_;
    std::map<std::string, std::string, std::less<>> complement_;
};

/// Builds the argumentation graph of a grounded KB. Throws Error if the KB is
/// not ground and CyclicSupport if the CA-free part has a cycle.
ArgGraph build_graph(const KnowledgeBase& kb);

struct ArgumentView {
    std::string conclusion;
    std::set<std::string> inodes;
    std::set<std::string> ranodes;
};

/// Ancestor closure of a claim in the CA-free graph. Throws UnknownClaim.
ArgumentView argument_for(const ArgGraph& g, const Literal& claim);

}  // namespace laf
