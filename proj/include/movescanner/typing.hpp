#pragma once

#include <set>
#include <string>
#include <vector>

#include "movescanner/dataflow.hpp"
#include "movescanner/module.hpp"

namespace mvsc {

struct QualifiedName {
    ModuleId module;
    std::string name;

    std::string str() const { return module.str() + "::" + name; }
    bool operator==(const QualifiedName&) const = default;
    bool operator<(const QualifiedName& o) const {
        return module != o.module ? module < o.module : name < o.name;
    }
};

struct TypedModule {
    ModuleDef base;
    std::set<std::string> resource_structs;
    std::set<std::string> capability_structs;
    std::vector<ModuleId> friend_list;
    // Struct operands naming modules (or structs) absent from the package.
    std::set<QualifiedName> external_structs;

    bool is_friend(const ModuleId& m) const;
};

struct Package {
    std::vector<TypedModule> modules;

    const TypedModule* find_module(const ModuleId& id) const;
    const StructDef* find_struct(const ModuleId& id, const std::string& n) const;
    const FunctionDef* find_function(const ModuleId& id,
                                     const std::string& n) const;
    bool is_resource(const ModuleId& id, const std::string& n) const;
    bool is_capability(const ModuleId& id, const std::string& n) const;

    // Resolution hooks for the stack simulation, package-wide.
    ResolveCtx resolve_ctx() const;
};

// Classifies structs (resource: no copy and no drop; capability: resource
// with store) and records struct operands that do not resolve anywhere in
// the package. Unresolved references are flagged, not errors.
TypedModule resolve_types(const ModuleDef& m,
                          const std::vector<ModuleDef>& package);

// Throws ParseError(Validation) on duplicate module ids.
Package make_package(std::vector<ModuleDef> modules);

}  // namespace mvsc
