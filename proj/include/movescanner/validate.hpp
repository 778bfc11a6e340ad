#pragma once

#include "movescanner/module.hpp"

namespace mvsc {

// Structural checks shared by the text and binary front ends: identifier and
// address shape, label resolution, terminator at end of body, local indices
// in range, signer placement, no nested references, own-module struct
// references resolve, label uniqueness. Throws ParseError(Validation).
void validate_module(const ModuleDef& m);

// Runs the abstract stack simulation for every function whose calls all
// resolve within this module; cross-module callees are unknown here, so those
// functions are checked later at package link time. Throws on underflow or a
// non-empty stack at a block boundary.
void validate_stack_discipline(const ModuleDef& m);

}  // namespace mvsc
