#include "moa/wpa.hpp"

#include <algorithm>
#include <deque>

namespace moa {

namespace {

std::string owner_of(const DeclID& member) {
    auto pos = member.find("::");
    return pos == std::string::npos ? std::string() : member.substr(0, pos);
}

// Nearest constructor run when `cls` is allocated: the first class in the
// chain (from `cls` upward) that declares one.
DeclID nearest_ctor(const ProgramIR& prog, const std::string& cls) {
    for (const IRClass* c = prog.find_class(cls); c;
         c = c->base.empty() ? nullptr : prog.find_class(c->base)) {
        if (c->has_ctor) return c->name + "::" + c->name;
    }
    return {};
}

// Every constructor that runs when `cls` is allocated, base first.
std::vector<DeclID> ctor_chain(const ProgramIR& prog, const std::string& cls) {
    std::vector<DeclID> chain;
    for (const IRClass* c = prog.find_class(cls); c;
         c = c->base.empty() ? nullptr : prog.find_class(c->base)) {
        if (c->has_ctor) chain.insert(chain.begin(), c->name + "::" + c->name);
    }
    return chain;
}

// Pins an operand to a function constant when it is one, possibly behind a
// chain of register-to-register casts.
std::optional<DeclID> resolve_operand(const IRFunction& fn, const IROperand& op) {
    if (op.kind == IROperandKind::FnConst) return op.fn;
    if (op.kind != IROperandKind::VReg) return std::nullopt;
    for (const auto& i : fn.body) {
        if (i.dst != op.vreg) continue;
        if (i.op == IROp::Cast && i.args.size() == 1) return resolve_operand(fn, i.args[0]);
        return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace

CallGraph build_callgraph(const ProgramIR& prog) {
    CallGraph cg;

    // Constructors implicitly run the next constructor up the chain.
    for (const auto& c : prog.classes) {
        if (!c.has_ctor || c.base.empty()) continue;
        DeclID up = nearest_ctor(prog, c.base);
        if (!up.empty()) cg.edges[c.name + "::" + c.name].insert(up);
    }

    for (const auto& fn : prog.functions) {
        cg.edges[fn.id];  // every function is a node
        for (const auto& i : fn.body) {
            switch (i.op) {
                case IROp::Call: {
                    if (i.intrinsic) break;
                    if (!i.new_class.empty()) {
                        DeclID ct = nearest_ctor(prog, i.new_class);
                        if (!ct.empty()) cg.edges[fn.id].insert(ct);
                    } else if (!i.callee.empty()) {
                        cg.edges[fn.id].insert(i.callee);
                    }
                    break;
                }
                case IROp::VCall: {
                    DynSite s;
                    s.in_function = fn.id;
                    s.loc = i.loc;
                    s.is_vcall = true;
                    s.vslot = i.vslot;
                    s.static_class = i.static_class;
                    cg.dyn_sites.push_back(std::move(s));
                    break;
                }
                case IROp::ICall: {
                    DynSite s;
                    s.in_function = fn.id;
                    s.loc = i.loc;
                    cg.dyn_sites.push_back(std::move(s));
                    break;
                }
                default:
                    break;
            }
        }
    }
    return cg;
}

void devirtualize_cha(const ProgramIR& prog, CallGraph& cg) {
    for (auto& site : cg.dyn_sites) {
        if (!site.is_vcall) continue;
        std::set<DeclID> targets;
        for (const auto& cls : prog.subclass_cone(site.static_class)) {
            const IRClass* c = prog.find_class(cls);
            if (c && site.vslot >= 0 && site.vslot < static_cast<int>(c->vtable.size()))
                targets.insert(c->vtable[site.vslot]);
        }
        site.cha_targets = targets;
        site.targets = std::move(targets);
        site.devirtualized = site.targets.size() == 1;
        if (site.devirtualized) site.reason = "single override in hierarchy";
    }
}

void resolve_indirect(const ProgramIR& prog, CallGraph& cg) {
    for (auto& site : cg.dyn_sites) {
        if (site.is_vcall) continue;
        const IRFunction* fn = prog.find_function(site.in_function);
        if (!fn) continue;

        // Locate the call instruction this site describes.
        const IRInstr* call = nullptr;
        for (const auto& i : fn->body)
            if (i.op == IROp::ICall && i.loc == site.loc) call = &i;
        if (!call || call->args.empty()) {
            site.reason = "unresolved function pointer";
            continue;
        }
        const IROperand& target = call->args[0];

        // A constant at the call, possibly behind casts.
        if (auto direct = resolve_operand(*fn, target)) {
            site.targets = {*direct};
            site.cha_targets = site.targets;
            site.devirtualized = true;
            site.reason = "constant function value";
            continue;
        }

        // A local with a single constant binding in this function. Parameters
        // are excluded: their value arrives from outside.
        if (target.kind == IROperandKind::Local &&
            std::find(fn->params.begin(), fn->params.end(), target.local) == fn->params.end()) {
            std::vector<const IRInstr*> moves;
            for (const auto& i : fn->body)
                if (i.op == IROp::Move && i.local == target.local) moves.push_back(&i);
            if (moves.size() == 1 && moves[0]->args.size() == 1) {
                if (auto t = resolve_operand(*fn, moves[0]->args[0])) {
                    site.targets = {*t};
                    site.cha_targets = site.targets;
                    site.devirtualized = true;
                    site.reason = "single local binding";
                    continue;
                }
            }
        }

        // A function-typed field with a single constant store program-wide.
        if (target.kind == IROperandKind::VReg) {
            const IRInstr* def = nullptr;
            for (const auto& i : fn->body)
                if (i.dst == target.vreg) def = &i;
            if (def && def->op == IROp::Load) {
                std::vector<DeclID> stored;
                bool opaque = false;
                for (const auto& g : prog.functions)
                    for (const auto& i : g.body)
                        if (i.op == IROp::Store && i.field == def->field) {
                            if (auto t = resolve_operand(g, i.args[0]))
                                stored.push_back(*t);
                            else
                                opaque = true;
                        }
                if (!opaque && stored.size() == 1) {
                    site.targets = {stored[0]};
                    site.cha_targets = site.targets;
                    site.devirtualized = true;
                    site.reason = "single field store";
                    continue;
                }
            }
        }

        site.reason = "unresolved function pointer";
    }
}

std::set<DeclID> callees_of(const CallGraph& cg, const DeclID& fn) {
    std::set<DeclID> out;
    auto it = cg.edges.find(fn);
    if (it != cg.edges.end()) out = it->second;
    for (const auto& site : cg.dyn_sites)
        if (site.in_function == fn) out.insert(site.targets.begin(), site.targets.end());
    return out;
}

std::set<DeclID> reachable_from(const CallGraph& cg, const std::vector<DeclID>& entries) {
    std::set<DeclID> seen;
    std::deque<DeclID> work(entries.begin(), entries.end());
    while (!work.empty()) {
        DeclID fn = work.front();
        work.pop_front();
        if (!seen.insert(fn).second) continue;
        for (const auto& next : callees_of(cg, fn)) work.push_back(next);
    }
    return seen;
}

void rta_prune(const ProgramIR& prog, CallGraph& cg, const std::vector<DeclID>& entries) {
    // Ascend from no instantiated classes: reachability and the allocation
    // set grow together until neither changes.
    std::set<std::string> inst;
    std::set<DeclID> reach;
    for (;;) {
        for (auto& site : cg.dyn_sites) {
            if (!site.is_vcall) continue;
            std::set<DeclID> filtered;
            for (const auto& cls : prog.subclass_cone(site.static_class)) {
                if (!inst.count(cls)) continue;
                const IRClass* c = prog.find_class(cls);
                if (c && site.vslot >= 0 && site.vslot < static_cast<int>(c->vtable.size()))
                    filtered.insert(c->vtable[site.vslot]);
            }
            site.targets = std::move(filtered);
        }

        std::set<DeclID> new_reach = reachable_from(cg, entries);
        std::set<std::string> new_inst;
        for (const auto& fn : prog.functions) {
            if (!new_reach.count(fn.id)) continue;
            for (const auto& i : fn.body)
                if (i.op == IROp::Call && !i.new_class.empty()) new_inst.insert(i.new_class);
        }
        if (new_reach == reach && new_inst == inst) break;
        reach = std::move(new_reach);
        inst = std::move(new_inst);
    }

    for (auto& site : cg.dyn_sites) {
        if (!site.is_vcall) continue;
        site.devirtualized = site.targets.size() == 1;
        if (site.targets.empty() && !site.cha_targets.empty())
            site.reason = "no instantiated receiver";
        else if (site.devirtualized)
            site.reason = "single instantiated override";
    }
}

std::set<DeclID> field_store_scan(const ProgramIR& prog, const DeclID& field,
                                  bool resolve_ref_aliases) {
    std::set<DeclID> out;
    for (const auto& fn : prog.functions) {
        for (const auto& i : fn.body) {
            if (i.op == IROp::Store && i.field == field) {
                out.insert(fn.id);
            } else if (resolve_ref_aliases && (i.op == IROp::Call || i.op == IROp::VCall)) {
                for (const auto& al : i.aliases) {
                    if (al.field != field) continue;
                    const DeclID callee =
                        !i.callee.empty() ? i.callee
                                          : (!i.new_class.empty() ? nearest_ctor(prog, i.new_class)
                                                                  : DeclID{});
                    const IRFunction* g = prog.find_function(callee);
                    if (g && g->ref_param_writes.count(al.param)) out.insert(fn.id);
                }
            }
        }
    }
    return out;
}

namespace {

struct ChainSearch {
    const ProgramIR& prog;
    const CallGraph& cg;
    const std::set<DeclID>& store_fns;
    const DeclID& read_fn;
    const std::string owner;
    const WpaOptions& opts;

    std::vector<DeclID> path;
    std::vector<std::vector<DeclID>> chains;

    // True when this function initializes the field as far as the chain rule
    // can see: a direct (or alias-resolved) store, or an allocation whose
    // constructor chain contains one.
    bool covers(const DeclID& fn) const {
        if (store_fns.count(fn)) return true;
        const IRFunction* f = prog.find_function(fn);
        if (!f) return false;
        for (const auto& i : f->body) {
            if (i.op != IROp::Call || i.new_class.empty()) continue;
            if (!prog.is_subclass_of(i.new_class, owner)) continue;
            for (const auto& ct : ctor_chain(prog, i.new_class))
                if (store_fns.count(ct)) return true;
        }
        return false;
    }

    void dfs(const DeclID& fn) {
        if (static_cast<int>(chains.size()) >= opts.chain_cap) return;
        if (static_cast<int>(path.size()) >= opts.max_depth) return;
        if (std::find(path.begin(), path.end(), fn) != path.end()) return;
        path.push_back(fn);
        if (fn == read_fn) {
            chains.push_back(path);
        } else {
            for (const auto& next : callees_of(cg, fn)) dfs(next);
        }
        path.pop_back();
    }
};

}  // namespace

WpaVerdict validate_garbage_read(const ProgramIR& prog, const CallGraph& cg, const DeclID& field,
                                 const DeclID& read_fn, const std::vector<DeclID>& entries,
                                 const WpaOptions& opts) {
    WpaVerdict verdict;
    std::set<DeclID> store_fns = field_store_scan(prog, field, opts.resolve_ref_aliases);

    ChainSearch search{prog, cg, store_fns, read_fn, owner_of(field), opts, {}, {}};
    for (const auto& e : entries) search.dfs(e);
    verdict.chains_examined = static_cast<int>(search.chains.size());

    if (search.chains.empty()) {
        verdict.reason = "unreachable";
        return verdict;
    }

    for (const auto& chain : search.chains) {
        bool covered = false;
        // The final frame is the reading function itself; its body was
        // already judged locally and gets no credit here.
        for (size_t i = 0; i + 1 < chain.size(); ++i) {
            if (search.covers(chain[i])) {
                covered = true;
                break;
            }
        }
        if (!covered) {
            verdict.confirmed = true;
            verdict.witness = chain;
            return verdict;
        }
    }

    verdict.reason = "all reaching chains initialize the field";
    return verdict;
}

}  // namespace moa
