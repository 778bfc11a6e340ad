#include "movescanner/typing.hpp"

#include <algorithm>

#include "movescanner/errors.hpp"

namespace mvsc {

bool TypedModule::is_friend(const ModuleId& m) const {
    return std::binary_search(friend_list.begin(), friend_list.end(), m);
}

const TypedModule* Package::find_module(const ModuleId& id) const {
    for (const auto& tm : modules)
        if (tm.base.id == id) return &tm;
    return nullptr;
}

const StructDef* Package::find_struct(const ModuleId& id,
                                      const std::string& n) const {
    const TypedModule* tm = find_module(id);
    return tm ? tm->base.find_struct(n) : nullptr;
}

const FunctionDef* Package::find_function(const ModuleId& id,
                                          const std::string& n) const {
    const TypedModule* tm = find_module(id);
    return tm ? tm->base.find_function(n) : nullptr;
}

bool Package::is_resource(const ModuleId& id, const std::string& n) const {
    const TypedModule* tm = find_module(id);
    return tm && tm->resource_structs.count(n) > 0;
}

bool Package::is_capability(const ModuleId& id, const std::string& n) const {
    const TypedModule* tm = find_module(id);
    return tm && tm->capability_structs.count(n) > 0;
}

ResolveCtx Package::resolve_ctx() const {
    ResolveCtx ctx;
    ctx.signature = [this](const ModuleId& mid, const std::string& fn) {
        CalleeSig sig;
        const FunctionDef* f = find_function(mid, fn);
        if (!f) return sig;
        sig.known = true;
        sig.param_count = f->params.size();
        sig.returns = f->returns;
        return sig;
    };
    ctx.struct_def = [this](const ModuleId& mid, const std::string& name) {
        return find_struct(mid, name);
    };
    return ctx;
}

TypedModule resolve_types(const ModuleDef& m,
                          const std::vector<ModuleDef>& package) {
    TypedModule tm;
    tm.base = m;
    tm.friend_list = m.friends;

    for (const auto& s : m.structs) {
        if (s.is_resource()) tm.resource_structs.insert(s.name);
        if (s.is_capability()) tm.capability_structs.insert(s.name);
    }

    auto resolves = [&](const ModuleId& mid, const std::string& name) {
        for (const auto& other : package)
            if (other.id == mid) return other.find_struct(name) != nullptr;
        return false;
    };
    for (const auto& f : m.functions)
        for (const auto& ins : f.body)
            if (operand_kind(ins.op) == OperandKind::StructRef &&
                !resolves(ins.target_module, ins.target_name))
                tm.external_structs.insert({ins.target_module, ins.target_name});
    return tm;
}

Package make_package(std::vector<ModuleDef> modules) {
    for (size_t i = 0; i < modules.size(); ++i)
        for (size_t j = i + 1; j < modules.size(); ++j)
            if (modules[i].id == modules[j].id)
                throw ParseError(ErrorKind::Validation,
                                 "duplicate module id " + modules[i].id.str());
    Package pkg;
    for (const auto& m : modules)
        pkg.modules.push_back(resolve_types(m, modules));
    return pkg;
}

}  // namespace mvsc
