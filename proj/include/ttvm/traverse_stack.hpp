#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <unordered_map>
#include <utility>

namespace ttvm {

// Persistent stack of pending branch-target pcs used by method traversal.
// Nodes are immutable and interned: pushing the same (pc, tail) twice yields
// the identical node. The empty stack is the null pointer.
struct TraverseStack {
    uint32_t pc;
    const TraverseStack* next;
};

inline bool t_is_empty(const TraverseStack* s) { return s == nullptr; }

inline std::pair<uint32_t, const TraverseStack*> t_pop(const TraverseStack* s) {
    if (!s) throw std::logic_error("t_pop on empty traverse stack");
    return {s->pc, s->next};
}

class TraverseInterner {
public:
    const TraverseStack* push(uint32_t pc, const TraverseStack* next) {
        Key key{pc, next};
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        arena_.push_back(TraverseStack{pc, next});
        const TraverseStack* node = &arena_.back();
        memo_.emplace(key, node);
        return node;
    }

    size_t node_count() const { return arena_.size(); }

private:
    using Key = std::pair<uint32_t, const TraverseStack*>;
    struct KeyHash {
        size_t operator()(const Key& k) const {
            return std::hash<uint64_t>()(k.first) ^
                   (std::hash<const void*>()(k.second) * 1000003u);
        }
    };
    std::unordered_map<Key, const TraverseStack*, KeyHash> memo_;
    std::deque<TraverseStack> arena_; // stable addresses
};

inline const TraverseStack* t_push(uint32_t pc, const TraverseStack* next,
                                   TraverseInterner& interner) {
    return interner.push(pc, next);
}

} // namespace ttvm
