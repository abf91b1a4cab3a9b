#include "sass/behavior_tree.hpp"

namespace sass {

BTNode BTNode::selector(std::vector<BTNode> children) {
    if (children.empty()) throw ValidationError("selector needs at least one child");
    BTNode n;
    n.kind = Kind::Selector;
    n.children = std::move(children);
    return n;
}

BTNode BTNode::sequence(std::vector<BTNode> children) {
    if (children.empty()) throw ValidationError("sequence needs at least one child");
    BTNode n;
    n.kind = Kind::Sequence;
    n.children = std::move(children);
    return n;
}

BTNode BTNode::condition(std::string id) {
    BTNode n;
    n.kind = Kind::Condition;
    n.leaf_id = std::move(id);
    return n;
}

BTNode BTNode::action(std::string id) {
    BTNode n;
    n.kind = Kind::Action;
    n.leaf_id = std::move(id);
    return n;
}

TickResult tick(const BTNode& node, Blackboard& bb, const LeafRegistry& reg, std::vector<std::string>* visit_log) {
    switch (node.kind) {
        case BTNode::Kind::Selector: {
            if (visit_log) visit_log->push_back("[?]");
            for (const auto& child : node.children) {
                TickResult r = tick(child, bb, reg, visit_log);
                if (r != TickResult::Failure) return r;
            }
            return TickResult::Failure;
        }
        case BTNode::Kind::Sequence: {
            if (visit_log) visit_log->push_back("[->]");
            for (const auto& child : node.children) {
                TickResult r = tick(child, bb, reg, visit_log);
                if (r != TickResult::Success) return r;
            }
            return TickResult::Success;
        }
        case BTNode::Kind::Condition: {
            if (visit_log) visit_log->push_back(node.leaf_id);
            auto it = reg.predicates.find(node.leaf_id);
            if (it == reg.predicates.end())
                throw ValidationError("behavior tree: unregistered predicate '" + node.leaf_id + "'");
            return it->second(bb) ? TickResult::Success : TickResult::Failure;
        }
        case BTNode::Kind::Action: {
            if (visit_log) visit_log->push_back(node.leaf_id);
            auto it = reg.actions.find(node.leaf_id);
            if (it == reg.actions.end())
                throw ValidationError("behavior tree: unregistered action '" + node.leaf_id + "'");
            return it->second(bb);
        }
    }
    return TickResult::Failure;
}

BTNode build_sass_tree() {
    using namespace bt_leaf;
    return BTNode::sequence({
        BTNode::action(kPerceive),
        BTNode::selector({BTNode::condition(kSafetyOk), BTNode::action(kEvade)}),
        BTNode::selector({BTNode::condition(kBasicOk), BTNode::action(kRecharge)}),
        BTNode::sequence({
            BTNode::condition(kTaskCandidate),
            BTNode::action(kComputeUtilities),
            BTNode::action(kPlan),
            BTNode::action(kNegotiate),
            BTNode::action(kExecuteAgreement),
        }),
    });
}

}  // namespace sass
