#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "movescanner/dataflow.hpp"
#include "movescanner/text_parser.hpp"
#include "support/build.hpp"

using namespace mvsc;
using namespace mvsc::testsupport;

namespace {

FunctionDef fn_of(const std::string& src) {
    return parse_text(src).functions.at(0);
}

ResolveCtx empty_ctx() {
    static ModuleDef m = [] {
        ModuleDef d;
        d.id = {"0x1", "m"};
        return d;
    }();
    return ResolveCtx::for_module(m);
}

// Independent substitution check: the returned facts must satisfy the
// transfer equations at every block.
void check_rd_fixpoint(const FunctionDef& f, const ControlFlowGraph& g,
                       const DataflowResult& rd) {
    std::map<uint32_t, std::set<Definition>> all_defs;
    for (uint32_t p = 0; p < f.params.size(); ++p)
        all_defs[p].insert({p, param_pseudo_site(p)});
    for (size_t i = 0; i < f.body.size(); ++i)
        if (f.body[i].op == Opcode::StLoc)
            all_defs[f.body[i].local].insert(
                {f.body[i].local, static_cast<int>(i)});

    for (const auto& b : g.blocks) {
        std::set<Definition> in;
        if (b.id == 0)
            for (uint32_t p = 0; p < f.params.size(); ++p)
                in.insert({p, param_pseudo_site(p)});
        for (int p : b.predecessors)
            in.insert(rd.def_out[p].begin(), rd.def_out[p].end());
        CHECK(in == rd.def_in[b.id]);

        std::map<uint32_t, Definition> last;
        for (size_t i = b.begin; i < b.end; ++i)
            if (f.body[i].op == Opcode::StLoc)
                last[f.body[i].local] = {f.body[i].local, static_cast<int>(i)};
        std::set<Definition> out;
        for (const auto& d : in)
            if (!last.count(d.local)) out.insert(d);
        for (const auto& [l, d] : last) out.insert(d);
        CHECK(out == rd.def_out[b.id]);
    }
}

void check_lv_fixpoint(const FunctionDef& f, const ControlFlowGraph& g,
                       const DataflowResult& lv) {
    for (const auto& b : g.blocks) {
        std::set<uint32_t> out;
        for (int s : b.successors)
            out.insert(lv.live_in[s].begin(), lv.live_in[s].end());
        CHECK(out == lv.live_out[b.id]);

        std::set<uint32_t> in = out;
        for (size_t i = b.end; i-- > b.begin;) {
            const Instruction& ins = f.body[i];
            if (ins.op == Opcode::StLoc) in.erase(ins.local);
            if (ins.op == Opcode::CopyLoc || ins.op == Opcode::MoveLoc ||
                ins.op == Opcode::BorrowLoc)
                in.insert(ins.local);
        }
        CHECK(in == lv.live_in[b.id]);
    }
}

}  // namespace

TEST_CASE("st_loc links to the instruction that pushed its operand") {
    FunctionDef f = fn_of(
        "module 0x1::m\n"
        "fun f() {\n"
        "    locals x: u64\n"
        "    ld_u64 5\n"
        "    st_loc x\n"
        "    ret\n"
        "}\n");
    ControlFlowGraph g = build_cfg(f);
    DefUseMap du = link_stack_defs(f, g, empty_ctx());
    REQUIRE(du.valid);
    CHECK(du.operand_producers[1] == std::vector<int>{0});
    CHECK(du.consumers[0] == std::vector<int>{1});
}

TEST_CASE("binary operands link to both producers in push order") {
    FunctionDef f = fn_of(
        "module 0x1::m\n"
        "fun f(a: u64, b: u64) {\n"
        "    locals c: u64\n"
        "    copy_loc a\n"
        "    copy_loc b\n"
        "    add\n"
        "    st_loc c\n"
        "    ret\n"
        "}\n");
    ControlFlowGraph g = build_cfg(f);
    DefUseMap du = link_stack_defs(f, g, empty_ctx());
    REQUIRE(du.valid);
    CHECK(du.operand_producers[2] == std::vector<int>{0, 1});
    CHECK(du.operand_producers[3] == std::vector<int>{2});
    CHECK(du.push_types[2].at(0) == TypeTag::u64());
}

TEST_CASE("a value left on the stack invalidates the def-use map") {
    FunctionDef f = FnBuilder("f")
                        .ins(make_imm(Opcode::LdU64, 1))
                        .ins(make_instr(Opcode::Ret))
                        .build();
    ControlFlowGraph g = build_cfg(f);
    DefUseMap du = link_stack_defs(f, g, empty_ctx());
    CHECK(!du.valid);
    CHECK(du.violation.find("left on stack") != std::string::npos);
}

TEST_CASE("stack underflow invalidates the def-use map") {
    FunctionDef f = FnBuilder("f")
                        .ins(make_instr(Opcode::Pop))
                        .ins(make_instr(Opcode::Ret))
                        .build();
    ControlFlowGraph g = build_cfg(f);
    DefUseMap du = link_stack_defs(f, g, empty_ctx());
    CHECK(!du.valid);
    CHECK(du.violation.find("underflow") != std::string::npos);
    CHECK(du.violation_site == 0);
}

TEST_CASE("straight-line redefinition kills the earlier definition") {
    FunctionDef f = fn_of(
        "module 0x1::m\n"
        "fun f() {\n"
        "    locals x: u64\n"
        "    ld_u64 1\n"
        "    st_loc x\n"
        "    ld_u64 2\n"
        "    st_loc x\n"
        "    copy_loc x\n"
        "    pop\n"
        "    ret\n"
        "}\n");
    ControlFlowGraph g = build_cfg(f);
    DataflowResult rd = reaching_definitions(f, g);
    uint32_t x = 0;
    CHECK(reaching_at(f, g, rd, 4, x) == std::set<Definition>{{x, 3}});
    check_rd_fixpoint(f, g, rd);
}

TEST_CASE("diamond arms both reach the join and kill the entry definition") {
    FunctionDef f = fn_of(
        "module 0x1::m\n"
        "fun f(c: bool) {\n"
        "    locals x: u64\n"
        "    ld_u64 0\n"
        "    st_loc x\n"
        "    copy_loc c\n"
        "    br_false else_arm\n"
        "    ld_u64 1\n"
        "    st_loc x\n"
        "    br join\n"
        "else_arm:\n"
        "    ld_u64 2\n"
        "    st_loc x\n"
        "join:\n"
        "    ret\n"
        "}\n");
    ControlFlowGraph g = build_cfg(f);
    DataflowResult rd = reaching_definitions(f, g);
    uint32_t x = f.locals.size() - 1;  // "x" is the only non-param local
    REQUIRE(g.blocks.size() == 4);
    std::set<Definition> of_x;
    for (const auto& d : rd.def_in[3])
        if (d.local == x) of_x.insert(d);
    CHECK(of_x == std::set<Definition>{{x, 5}, {x, 8}});  // entry def killed
    check_rd_fixpoint(f, g, rd);
}

TEST_CASE("loop head sees the definition before and inside the loop") {
    FunctionDef f = fn_of(
        "module 0x1::m\n"
        "fun f(c: bool) {\n"
        "    locals x: u64\n"
        "    ld_u64 0\n"
        "    st_loc x\n"
        "head:\n"
        "    copy_loc c\n"
        "    br_false out\n"
        "    ld_u64 1\n"
        "    st_loc x\n"
        "    br head\n"
        "out:\n"
        "    ret\n"
        "}\n");
    ControlFlowGraph g = build_cfg(f);
    DataflowResult rd = reaching_definitions(f, g);
    uint32_t x = 1;
    int head = g.block_of(2);
    std::set<Definition> at_head;
    for (const auto& d : rd.def_in[head])
        if (d.local == x) at_head.insert(d);
    CHECK(at_head == std::set<Definition>{{x, 1}, {x, 5}});
    check_rd_fixpoint(f, g, rd);
}

TEST_CASE("a local written but never read is live nowhere") {
    FunctionDef f = fn_of(
        "module 0x1::m\n"
        "fun f() {\n"
        "    locals x: u64\n"
        "    ld_u64 1\n"
        "    st_loc x\n"
        "    ret\n"
        "}\n");
    ControlFlowGraph g = build_cfg(f);
    DataflowResult lv = live_variables(f, g);
    for (const auto& b : g.blocks) {
        CHECK(!lv.live_in[b.id].count(0));
        CHECK(!lv.live_out[b.id].count(0));
    }
    check_lv_fixpoint(f, g, lv);
}

TEST_CASE("a local read in both diamond arms is live out of the entry") {
    FunctionDef f = fn_of(
        "module 0x1::m\n"
        "fun f(c: bool, x: u64) {\n"
        "    copy_loc c\n"
        "    br_false else_arm\n"
        "    copy_loc x\n"
        "    pop\n"
        "    br join\n"
        "else_arm:\n"
        "    copy_loc x\n"
        "    pop\n"
        "join:\n"
        "    ret\n"
        "}\n");
    ControlFlowGraph g = build_cfg(f);
    DataflowResult lv = live_variables(f, g);
    uint32_t x = 1;
    CHECK(lv.live_out[0].count(x));
    check_lv_fixpoint(f, g, lv);
}

TEST_CASE("redefinition at block top hides the later use from predecessors") {
    FunctionDef f = fn_of(
        "module 0x1::m\n"
        "fun f() {\n"
        "    locals x: u64\n"
        "    ld_u64 1\n"
        "    st_loc x\n"
        "    br next\n"
        "next:\n"
        "    ld_u64 2\n"
        "    st_loc x\n"
        "    copy_loc x\n"
        "    pop\n"
        "    ret\n"
        "}\n");
    ControlFlowGraph g = build_cfg(f);
    DataflowResult lv = live_variables(f, g);
    uint32_t x = 0;
    int next = g.block_of(3);
    CHECK(!lv.live_in[next].count(x));
    CHECK(!lv.live_out[0].count(x));
    check_lv_fixpoint(f, g, lv);
}

TEST_CASE("live_after distinguishes positions inside one block") {
    FunctionDef f = fn_of(
        "module 0x1::m\n"
        "fun f() {\n"
        "    locals x: u64\n"
        "    ld_u64 1\n"
        "    st_loc x\n"
        "    copy_loc x\n"
        "    pop\n"
        "    ret\n"
        "}\n");
    ControlFlowGraph g = build_cfg(f);
    DataflowResult lv = live_variables(f, g);
    CHECK(live_after(f, g, lv, 1, 0));    // before the read
    CHECK(!live_after(f, g, lv, 2, 0));   // read already happened
}

TEST_CASE("fixpoints equal the meet-over-paths oracle on random DAGs") {
    std::mt19937 rng(424242);
    for (int iter = 0; iter < 200; ++iter) {
        FunctionDef f = random_function(rng, 6, 4, /*allow_cycles=*/false);
        ControlFlowGraph g = build_cfg(f);
        DataflowResult rd = reaching_definitions(f, g);
        DataflowResult lv = live_variables(f, g);
        PathOracle oracle = meet_over_paths(f, g);
        for (const auto& b : g.blocks) {
            if (!b.reachable) continue;
            CAPTURE(iter);
            CAPTURE(b.id);
            CHECK(rd.def_in[b.id] == oracle.def_in[b.id]);
            CHECK(rd.def_out[b.id] == oracle.def_out[b.id]);
            CHECK(lv.live_in[b.id] == oracle.live_in[b.id]);
            CHECK(lv.live_out[b.id] == oracle.live_out[b.id]);
        }
    }
}

TEST_CASE("fixpoint substitution and convergence bounds on cyclic CFGs") {
    std::mt19937 rng(31337);
    for (int iter = 0; iter < 200; ++iter) {
        FunctionDef f = random_function(rng, 6, 4, /*allow_cycles=*/true);
        ControlFlowGraph g = build_cfg(f);
        DataflowResult rd = reaching_definitions(f, g);
        DataflowResult lv = live_variables(f, g);
        check_rd_fixpoint(f, g, rd);
        check_lv_fixpoint(f, g, lv);
        size_t bound = g.blocks.size() * f.locals.size() + 1;
        CHECK(rd.iterations <= bound);
        CHECK(lv.iterations <= bound);
    }
}

TEST_CASE("producers precede consumers inside every block") {
    std::mt19937 rng(555);
    for (int iter = 0; iter < 200; ++iter) {
        FunctionDef f = random_function(rng, 6, 4, /*allow_cycles=*/true);
        ControlFlowGraph g = build_cfg(f);
        DefUseMap du = link_stack_defs(f, g, empty_ctx());
        REQUIRE(du.valid);
        for (size_t i = 0; i < f.body.size(); ++i)
            for (int p : du.operand_producers[i]) {
                CHECK(p < static_cast<int>(i));
                CHECK(g.block_of(p) == g.block_of(i));
            }
    }
}
