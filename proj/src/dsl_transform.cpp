#include "miriam/dsl.hpp"

#include <numeric>
#include <sstream>

namespace miriam::dsl {

namespace {

ExprPtr subst_expr(const ExprPtr& e, const std::map<std::string, std::string>& map) {
    switch (e->kind) {
        case Expr::Kind::IntLit:
            return e;
        case Expr::Kind::Var: {
            auto it = map.find(e->name);
            return it == map.end() ? e : make_var(it->second);
        }
        case Expr::Kind::ArrayRef:
            return make_array_ref(e->name, subst_expr(e->index, map));
        case Expr::Kind::Binary:
            return make_binary(e->bop, subst_expr(e->lhs, map), subst_expr(e->rhs, map));
        case Expr::Kind::Unary:
            return make_unary(e->uop, subst_expr(e->lhs, map));
    }
    throw std::logic_error("subst_expr: bad expression kind");
}

StmtPtr subst_stmt(const StmtPtr& s, const std::map<std::string, std::string>& map) {
    auto out = std::make_shared<Stmt>(*s);
    if (s->expr) out->expr = subst_expr(s->expr, map);
    if (s->index) out->index = subst_expr(s->index, map);
    if (s->cond) out->cond = subst_expr(s->cond, map);
    if (s->step) out->step = subst_expr(s->step, map);
    out->body.clear();
    for (const auto& c : s->body) out->body.push_back(subst_stmt(c, map));
    out->else_body.clear();
    for (const auto& c : s->else_body) out->else_body.push_back(subst_stmt(c, map));
    return out;
}

StmtPtr decl(const std::string& name, ExprPtr init) {
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::VarDecl;
    s->name = name;
    s->expr = std::move(init);
    return s;
}

StmtPtr for_loop(const std::string& var, ExprPtr init, ExprPtr cond, ExprPtr step,
                 std::vector<StmtPtr> body) {
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::For;
    s->name = var;
    s->expr = std::move(init);
    s->cond = std::move(cond);
    s->step = std::move(step);
    s->body = std::move(body);
    return s;
}

}  // namespace

KernelAst elasticize(const KernelAst& ast, IndexMode mode) {
    for (const auto& p : ast.params)
        if (p.name.rfind("__", 0) == 0)
            throw std::invalid_argument("elasticize: reserved parameter name " + p.name);

    const std::map<std::string, std::string> subst = {
        {"threadIdx.x", "__lt"},
        {"blockIdx.x", "__lb"},
        {"blockDim.x", "__logical_block_dim"},
        {"gridDim.x", "__logical_grid_dim"},
    };
    std::vector<StmtPtr> inner;
    for (const auto& s : ast.body) inner.push_back(subst_stmt(s, subst));

    KernelAst out;
    out.name = ast.name + "_elastic";
    out.params = ast.params;

    if (mode == IndexMode::Computation) {
        out.body.push_back(
            decl("__lb", make_binary(BinOp::Add, make_var("blockIdx.x"), make_var("__shard_start"))));
        out.body.push_back(for_loop(
            "__lt", make_var("threadIdx.x"),
            make_binary(BinOp::Lt, make_var("__lt"), make_var("__logical_block_dim")),
            make_binary(BinOp::Add, make_var("__lt"), make_var("blockDim.x")), std::move(inner)));
        return out;
    }

    // Memory mode: logical ids come from the host-precomputed flat table.
    out.body.push_back(decl(
        "__pbs",
        make_binary(BinOp::Mul,
                    make_binary(BinOp::Div,
                                make_binary(BinOp::Sub,
                                            make_binary(BinOp::Add, make_var("__logical_block_dim"),
                                                        make_var("blockDim.x")),
                                            make_int(1)),
                                make_var("blockDim.x")),
                    make_var("blockDim.x"))));
    auto guard = std::make_shared<Stmt>();
    guard->kind = Stmt::Kind::If;
    guard->cond = make_binary(BinOp::Ge, make_var("__id"), make_int(0));
    guard->body.push_back(
        decl("__lt", make_binary(BinOp::Mod, make_var("__id"), make_var("__logical_block_dim"))));
    guard->body.push_back(
        decl("__lb", make_binary(BinOp::Div, make_var("__id"), make_var("__logical_block_dim"))));
    for (auto& s : inner) guard->body.push_back(s);

    std::vector<StmtPtr> loop_body;
    loop_body.push_back(decl(
        "__slot",
        make_binary(BinOp::Add, make_binary(BinOp::Mul, make_var("blockIdx.x"), make_var("__pbs")),
                    make_var("__k"))));
    loop_body.push_back(decl("__id", make_array_ref("__idx_table", make_var("__slot"))));
    loop_body.push_back(guard);

    out.body.push_back(for_loop("__k", make_var("threadIdx.x"),
                                make_binary(BinOp::Lt, make_var("__k"), make_var("__pbs")),
                                make_binary(BinOp::Add, make_var("__k"), make_var("blockDim.x")),
                                std::move(loop_body)));
    return out;
}

EquivalenceReport verify_equivalence(const KernelAst& original, const KernelAst& elastic,
                                     int m, int b, const std::vector<std::vector<int>>& shard_plans,
                                     const Arrays& inputs, const Scalars& scalars, int warp_size) {
    if (shard_plans.empty())
        throw std::invalid_argument("verify_equivalence: at least one shard plan required");
    for (const auto& plan : shard_plans) {
        if (plan.empty()) throw std::invalid_argument("verify_equivalence: empty shard plan");
        if (std::accumulate(plan.begin(), plan.end(), 0) != m)
            throw std::invalid_argument("verify_equivalence: shard plan does not partition [0,M)");
    }

    LaunchConfig full;
    full.grid_size = m;
    full.block_size = b;
    full.logical_grid_size = m;
    full.logical_block_size = b;
    const Arrays reference = interpret(original, full, inputs, scalars).outputs;

    std::vector<int> block_sizes;
    for (int s = warp_size; s < b; s += warp_size) block_sizes.push_back(s);
    block_sizes.push_back(b);

    EquivalenceReport report;
    for (const auto& plan : shard_plans) {
        for (int eb : block_sizes) {
            Arrays state = inputs;
            int offset = 0;
            std::string detail;
            bool pass = true;
            try {
                for (int shard : plan) {
                    LaunchConfig cfg;
                    cfg.grid_size = shard;
                    cfg.block_size = eb;
                    cfg.shard_start = offset;
                    cfg.logical_grid_size = m;
                    cfg.logical_block_size = b;
                    // Memory mode also serves computation-mode kernels: the
                    // precomputed table is simply unused by them.
                    cfg.index_mode = IndexMode::Memory;
                    auto r = interpret(elastic, cfg, state, scalars);
                    for (auto& [name, data] : r.outputs) state[name] = std::move(data);
                    offset += shard;
                }
                for (const auto& [name, data] : reference) {
                    if (state.at(name) != data) {
                        pass = false;
                        detail = "mismatch in array " + name;
                        break;
                    }
                }
            } catch (const std::exception& e) {
                pass = false;
                detail = e.what();
            }
            report.entries.push_back({plan, eb, pass, detail});
            if (!pass) report.all_pass = false;
        }
    }
    return report;
}

}  // namespace miriam::dsl
