#pragma once
// In-memory knowledge graph: entity/relation vocabularies, the triple set,
// and adjacency indices. This is the substrate the RL environment mutates.
//
// Identifiers are interned to dense uint32 ids; all on-disk artifacts stay
// in string space, so the intern order never leaks out of a process.
// There is no removal operation — splits rebuild instead of deleting.

#include "kgc/errors.hpp"
#include "kgc/triple.hpp"

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace kgc {

enum class InsertOutcome { Inserted, AlreadyPresent };

class KnowledgeGraph {
public:
    using Id = std::uint32_t;

    InsertOutcome insert(const Triple& t) {
        validate_triple(t);
        const Id h = intern_entity(t.head);
        const Id r = intern_relation(t.relation);
        const Id ta = intern_entity(t.tail);
        const Key key = pack(h, r, ta);
        if (!triples_.insert(key).second) return InsertOutcome::AlreadyPresent;
        out_index_[h].insert(pack_edge(r, ta));
        in_index_[ta].insert(pack_edge(r, h));
        neighbors_[h].insert(ta);
        neighbors_[ta].insert(h);
        return InsertOutcome::Inserted;
    }

    bool contains(const Triple& t) const {
        const Id* h = find_entity(t.head);
        const Id* r = find_relation(t.relation);
        const Id* ta = find_entity(t.tail);
        if (!h || !r || !ta) return false;
        return triples_.count(pack(*h, *r, *ta)) > 0;
    }

    std::size_t num_entities() const { return entity_names_.size(); }
    std::size_t num_relations() const { return relation_names_.size(); }
    std::size_t num_triples() const { return triples_.size(); }

    /// Triples incident to e, counting direction (a self-loop counts twice).
    std::size_t degree(const std::string& entity) const {
        const Id* e = find_entity(entity);
        if (!e) return 0;
        return out_index_[*e].size() + in_index_[*e].size();
    }

    /// Common neighbors of e1 and e2, edge direction and relation labels
    /// ignored. Either entity absent -> 0.
    std::size_t neighbor_overlap(const std::string& e1, const std::string& e2) const {
        const Id* a = find_entity(e1);
        const Id* b = find_entity(e2);
        if (!a || !b) return 0;
        const auto& na = neighbors_[*a];
        const auto& nb = neighbors_[*b];
        const auto& small = na.size() <= nb.size() ? na : nb;
        const auto& large = na.size() <= nb.size() ? nb : na;
        std::size_t count = 0;
        for (Id n : small) {
            if (large.count(n)) ++count;
        }
        return count;
    }

    double mean_degree() const {
        if (entity_names_.empty()) return 0.0;
        // every triple contributes one out slot and one in slot
        return 2.0 * static_cast<double>(triples_.size()) / static_cast<double>(entity_names_.size());
    }

    /// Vocabularies in intern (insertion) order; corruption sampling indexes these.
    const std::vector<std::string>& entities() const { return entity_names_; }
    const std::vector<std::string>& relations() const { return relation_names_; }

    bool has_entity(const std::string& e) const { return find_entity(e) != nullptr; }
    bool has_relation(const std::string& r) const { return find_relation(r) != nullptr; }

    /// All triples in lexicographic (head, relation, tail) order.
    std::vector<Triple> all_triples() const {
        std::vector<Triple> out;
        out.reserve(triples_.size());
        for (Key key : triples_) {
            out.push_back(unpack(key));
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// (relation, tail) pairs leaving `entity`, sorted.
    std::vector<std::pair<std::string, std::string>> out_edges(const std::string& entity) const {
        return edge_list(entity, out_index_);
    }

    /// (relation, head) pairs arriving at `entity`, sorted.
    std::vector<std::pair<std::string, std::string>> in_edges(const std::string& entity) const {
        return edge_list(entity, in_index_);
    }

    /// Sorted TSV dump; bit-exact for diffing.
    void serialize(std::ostream& out) const { write_triples(out, all_triples()); }

    std::string serialize() const {
        std::ostringstream out;
        serialize(out);
        return out.str();
    }

private:
    using Key = std::uint64_t; // packed (head, relation, tail) via id widening
    struct KeyHash {
        std::size_t operator()(Key k) const {
            // splitmix64 finalizer
            k = (k ^ (k >> 30)) * 0xbf58476d1ce4e5b9ull;
            k = (k ^ (k >> 27)) * 0x94d049bb133111ebull;
            return static_cast<std::size_t>(k ^ (k >> 31));
        }
    };

    // 21 bits per component: ample for desk-scale graphs, keeps the key in
    // one word.
    static constexpr Id kIdLimit = (1u << 21) - 1;

    static Key pack(Id h, Id r, Id t) {
        return (static_cast<Key>(h) << 42) | (static_cast<Key>(r) << 21) | static_cast<Key>(t);
    }

    Triple unpack(Key key) const {
        const Id h = static_cast<Id>(key >> 42);
        const Id r = static_cast<Id>((key >> 21) & kIdLimit);
        const Id t = static_cast<Id>(key & kIdLimit);
        return Triple{entity_names_[h], relation_names_[r], entity_names_[t]};
    }

    static std::uint64_t pack_edge(Id relation, Id other) {
        return (static_cast<std::uint64_t>(relation) << 32) | other;
    }

    Id intern_entity(const std::string& name) {
        auto it = entity_ids_.find(name);
        if (it != entity_ids_.end()) return it->second;
        const Id id = static_cast<Id>(entity_names_.size());
        if (id > kIdLimit) throw ArgumentError("entity vocabulary exceeds id limit");
        entity_names_.push_back(name);
        entity_ids_.emplace(name, id);
        out_index_.emplace_back();
        in_index_.emplace_back();
        neighbors_.emplace_back();
        return id;
    }

    Id intern_relation(const std::string& name) {
        auto it = relation_ids_.find(name);
        if (it != relation_ids_.end()) return it->second;
        const Id id = static_cast<Id>(relation_names_.size());
        if (id > kIdLimit) throw ArgumentError("relation vocabulary exceeds id limit");
        relation_names_.push_back(name);
        relation_ids_.emplace(name, id);
        return id;
    }

    const Id* find_entity(const std::string& name) const {
        auto it = entity_ids_.find(name);
        return it == entity_ids_.end() ? nullptr : &it->second;
    }

    const Id* find_relation(const std::string& name) const {
        auto it = relation_ids_.find(name);
        return it == relation_ids_.end() ? nullptr : &it->second;
    }

    std::vector<std::pair<std::string, std::string>>
    edge_list(const std::string& entity,
              const std::vector<std::unordered_set<std::uint64_t>>& index) const {
        std::vector<std::pair<std::string, std::string>> out;
        const Id* e = find_entity(entity);
        if (!e) return out;
        out.reserve(index[*e].size());
        for (std::uint64_t edge : index[*e]) {
            out.emplace_back(relation_names_[edge >> 32],
                             entity_names_[edge & 0xffffffffull]);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<std::string> entity_names_;
    std::vector<std::string> relation_names_;
    std::unordered_map<std::string, Id> entity_ids_;
    std::unordered_map<std::string, Id> relation_ids_;
    std::unordered_set<Key, KeyHash> triples_;
    std::vector<std::unordered_set<std::uint64_t>> out_index_; // entity -> {(relation, tail)}
    std::vector<std::unordered_set<std::uint64_t>> in_index_;  // entity -> {(relation, head)}
    std::vector<std::unordered_set<Id>> neighbors_;            // undirected, label-blind
};

inline KnowledgeGraph build_graph(const std::vector<Triple>& triples) {
    KnowledgeGraph g;
    for (const auto& t : triples) g.insert(t);
    return g;
}

} // namespace kgc
