#pragma once

#include <any>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sass/core.hpp"

namespace sass {

enum class TickResult { Success, Failure, Running };

inline const char* tick_result_name(TickResult r) {
    constexpr const char* names[] = {"Success", "Failure", "Running"};
    return names[static_cast<int>(r)];
}

// Agent-local key/value store; writes are visible to later nodes in the same tick.
class Blackboard {
public:
    template <typename T>
    void set(const std::string& key, T value) {
        slots_[key] = std::move(value);
    }

    template <typename T>
    T* get(const std::string& key) {
        auto it = slots_.find(key);
        if (it == slots_.end()) return nullptr;
        return std::any_cast<T>(&it->second);
    }

    template <typename T>
    const T* get(const std::string& key) const {
        auto it = slots_.find(key);
        if (it == slots_.end()) return nullptr;
        return std::any_cast<T>(&it->second);
    }

    bool has(const std::string& key) const { return slots_.count(key) > 0; }
    void erase(const std::string& key) { slots_.erase(key); }

private:
    std::map<std::string, std::any> slots_;
};

struct BTNode {
    enum class Kind { Selector, Sequence, Condition, Action };

    Kind kind = Kind::Action;
    std::string leaf_id;           // Condition/Action only
    std::vector<BTNode> children;  // Selector/Sequence only

    static BTNode selector(std::vector<BTNode> children);
    static BTNode sequence(std::vector<BTNode> children);
    static BTNode condition(std::string id);
    static BTNode action(std::string id);
};

struct LeafRegistry {
    std::map<std::string, std::function<bool(Blackboard&)>> predicates;
    std::map<std::string, std::function<TickResult(Blackboard&)>> actions;
};

// Memory-less tick. Selector returns the first child result that is not
// Failure; Sequence the first that is not Success. Visited leaf/composite ids
// are appended to visit_log when given, left to right, for instrumentation.
TickResult tick(const BTNode& node, Blackboard& bb, const LeafRegistry& reg,
                std::vector<std::string>* visit_log = nullptr);

// The fixed per-agent tree: perceive, then safety and energy gates, then the
// cooperation branch (candidate check, utilities, plan, negotiate, execute).
BTNode build_sass_tree();

// Leaf ids used by build_sass_tree; scenario runners register these.
namespace bt_leaf {
inline constexpr const char* kPerceive = "perceive";
inline constexpr const char* kSafetyOk = "safety_ok";
inline constexpr const char* kEvade = "evade";
inline constexpr const char* kBasicOk = "basic_ok";
inline constexpr const char* kRecharge = "recharge";
inline constexpr const char* kTaskCandidate = "task_candidate";
inline constexpr const char* kComputeUtilities = "compute_utilities";
inline constexpr const char* kPlan = "plan";
inline constexpr const char* kNegotiate = "negotiate";
inline constexpr const char* kExecuteAgreement = "execute_agreement";
}  // namespace bt_leaf

}  // namespace sass
