#include "miriam/dsl.hpp"

#include <random>

namespace miriam::dsl {

namespace {

constexpr long long kLoopCap = 1 << 22;

struct ThreadEnv {
    // scalar environment: launch builtins + declared vars
    std::map<std::string, long long>* scalars;
    Arrays* arrays;
    const std::vector<long long>* idx_table;
    // write-conflict tracking: (array, cell) -> global thread id of last writer
    std::map<std::pair<std::string, long long>, long long>* writers;
    long long global_thread_id = 0;
    std::vector<std::string>* warnings;
};

long long eval(const Expr& e, ThreadEnv& env);

long long eval_array(const Expr& e, ThreadEnv& env) {
    const long long idx = eval(*e.index, env);
    if (e.name == "__idx_table") {
        if (!env.idx_table)
            throw DslError(e.pos, "__idx_table used without a memory-mode launch");
        if (idx < 0 || idx >= static_cast<long long>(env.idx_table->size()))
            throw DslError(e.pos, "out-of-bounds read: __idx_table[" + std::to_string(idx) + "]");
        return (*env.idx_table)[static_cast<std::size_t>(idx)];
    }
    auto it = env.arrays->find(e.name);
    if (it == env.arrays->end()) throw DslError(e.pos, "array not bound: " + e.name);
    if (idx < 0 || idx >= static_cast<long long>(it->second.size()))
        throw DslError(e.pos, "out-of-bounds read: " + e.name + "[" + std::to_string(idx) + "]");
    return it->second[static_cast<std::size_t>(idx)];
}

long long eval(const Expr& e, ThreadEnv& env) {
    switch (e.kind) {
        case Expr::Kind::IntLit:
            return e.value;
        case Expr::Kind::Var: {
            auto it = env.scalars->find(e.name);
            if (it == env.scalars->end()) throw DslError(e.pos, "unbound identifier: " + e.name);
            return it->second;
        }
        case Expr::Kind::ArrayRef:
            return eval_array(e, env);
        case Expr::Kind::Unary: {
            const long long v = eval(*e.lhs, env);
            return e.uop == UnOp::Neg ? -v : (v == 0 ? 1 : 0);
        }
        case Expr::Kind::Binary: {
            if (e.bop == BinOp::And) return (eval(*e.lhs, env) != 0 && eval(*e.rhs, env) != 0) ? 1 : 0;
            if (e.bop == BinOp::Or) return (eval(*e.lhs, env) != 0 || eval(*e.rhs, env) != 0) ? 1 : 0;
            const long long a = eval(*e.lhs, env);
            const long long b = eval(*e.rhs, env);
            switch (e.bop) {
                case BinOp::Add: return a + b;
                case BinOp::Sub: return a - b;
                case BinOp::Mul: return a * b;
                case BinOp::Div:
                    if (b == 0) throw DslError(e.pos, "division by zero");
                    return a / b;
                case BinOp::Mod:
                    if (b == 0) throw DslError(e.pos, "modulo by zero");
                    return a % b;
                case BinOp::Lt: return a < b ? 1 : 0;
                case BinOp::Le: return a <= b ? 1 : 0;
                case BinOp::Gt: return a > b ? 1 : 0;
                case BinOp::Ge: return a >= b ? 1 : 0;
                case BinOp::Eq: return a == b ? 1 : 0;
                case BinOp::Ne: return a != b ? 1 : 0;
                default: break;
            }
            throw DslError(e.pos, "bad binary operator");
        }
    }
    throw DslError(e.pos, "bad expression kind");
}

void exec_block(const std::vector<StmtPtr>& body, ThreadEnv& env);

void exec_stmt(const Stmt& s, ThreadEnv& env) {
    switch (s.kind) {
        case Stmt::Kind::VarDecl:
        case Stmt::Kind::Assign:
            (*env.scalars)[s.name] = eval(*s.expr, env);
            break;
        case Stmt::Kind::Store: {
            const long long idx = eval(*s.index, env);
            const long long val = eval(*s.expr, env);
            auto it = env.arrays->find(s.name);
            if (it == env.arrays->end()) throw DslError(s.pos, "array not bound: " + s.name);
            if (idx < 0 || idx >= static_cast<long long>(it->second.size()))
                throw DslError(s.pos,
                               "out-of-bounds write: " + s.name + "[" + std::to_string(idx) + "]");
            it->second[static_cast<std::size_t>(idx)] = val;
            auto key = std::make_pair(s.name, idx);
            auto w = env.writers->find(key);
            if (w != env.writers->end() && w->second != env.global_thread_id) {
                if (env.warnings->size() < 16)
                    env.warnings->push_back("duplicate write to " + s.name + "[" +
                                            std::to_string(idx) + "] from different threads");
            }
            (*env.writers)[key] = env.global_thread_id;
            break;
        }
        case Stmt::Kind::If:
            if (eval(*s.cond, env) != 0) exec_block(s.body, env);
            else exec_block(s.else_body, env);
            break;
        case Stmt::Kind::For: {
            (*env.scalars)[s.name] = eval(*s.expr, env);
            long long iters = 0;
            while (eval(*s.cond, env) != 0) {
                exec_block(s.body, env);
                (*env.scalars)[s.name] = eval(*s.step, env);
                if (++iters > kLoopCap)
                    throw DslError(s.pos, "loop exceeded iteration cap");
            }
            break;
        }
    }
}

void exec_block(const std::vector<StmtPtr>& body, ThreadEnv& env) {
    for (const auto& s : body) exec_stmt(*s, env);
}

std::vector<long long> build_index_table(const LaunchConfig& cfg) {
    // Flat (shard-local slot -> logical thread id) map, padded per block.
    const int per_block =
        (cfg.logical_block_size + cfg.block_size - 1) / cfg.block_size * cfg.block_size;
    std::vector<long long> table(
        static_cast<std::size_t>(cfg.grid_size) * static_cast<std::size_t>(per_block), -1);
    for (int p = 0; p < cfg.grid_size; ++p) {
        const long long lb = p + cfg.shard_start;
        for (int k = 0; k < cfg.logical_block_size; ++k)
            table[static_cast<std::size_t>(p) * per_block + k] =
                lb * cfg.logical_block_size + k;
    }
    return table;
}

}  // namespace

InterpretResult interpret(const KernelAst& ast, const LaunchConfig& cfg, const Arrays& inputs,
                          const Scalars& scalars) {
    if (cfg.grid_size < 1 || cfg.block_size < 1)
        throw std::invalid_argument("interpret: grid/block sizes must be >= 1");
    if (cfg.shard_start + cfg.grid_size > cfg.logical_grid_size && cfg.shard_start != 0)
        throw std::invalid_argument("interpret: shard exceeds logical grid");

    Arrays arrays;
    for (const auto& p : ast.params) {
        if (!p.is_array()) continue;
        auto it = inputs.find(p.name);
        if (it == inputs.end())
            throw std::invalid_argument("interpret: missing array input: " + p.name);
        arrays[p.name] = it->second;
    }
    for (const auto& p : ast.params) {
        if (p.dir == ParamDir::Scalar && !scalars.count(p.name))
            throw std::invalid_argument("interpret: missing scalar input: " + p.name);
    }

    std::vector<long long> table;
    if (cfg.index_mode == IndexMode::Memory) table = build_index_table(cfg);

    std::map<std::pair<std::string, long long>, long long> writers;
    std::vector<std::string> warnings;

    for (int b = 0; b < cfg.grid_size; ++b) {
        for (int t = 0; t < cfg.block_size; ++t) {
            std::map<std::string, long long> env_scalars(scalars.begin(), scalars.end());
            env_scalars["threadIdx.x"] = t;
            env_scalars["blockIdx.x"] = b;
            env_scalars["blockDim.x"] = cfg.block_size;
            env_scalars["gridDim.x"] = cfg.grid_size;
            env_scalars["__shard_start"] = cfg.shard_start;
            env_scalars["__logical_grid_dim"] = cfg.logical_grid_size;
            env_scalars["__logical_block_dim"] = cfg.logical_block_size;
            ThreadEnv env;
            env.scalars = &env_scalars;
            env.arrays = &arrays;
            env.idx_table = cfg.index_mode == IndexMode::Memory ? &table : nullptr;
            env.writers = &writers;
            env.global_thread_id = static_cast<long long>(b) * cfg.block_size + t;
            env.warnings = &warnings;
            exec_block(ast.body, env);
        }
    }

    InterpretResult res;
    for (const auto& p : ast.params) {
        if (p.dir == ParamDir::Out || p.dir == ParamDir::InOut)
            res.outputs[p.name] = std::move(arrays[p.name]);
    }
    res.warnings = std::move(warnings);
    return res;
}

Arrays make_random_inputs(const KernelAst& ast, const std::map<std::string, int>& lengths,
                          std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Arrays arrays;
    for (const auto& p : ast.params) {
        if (!p.is_array()) continue;
        auto it = lengths.find(p.name);
        if (it == lengths.end())
            throw std::invalid_argument("make_random_inputs: missing length for " + p.name);
        std::vector<long long> v(static_cast<std::size_t>(it->second), 0);
        if (p.dir != ParamDir::Out)
            for (auto& x : v) x = static_cast<long long>(rng() % 1000) - 500;
        arrays[p.name] = std::move(v);
    }
    return arrays;
}

}  // namespace miriam::dsl
