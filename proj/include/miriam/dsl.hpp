#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace miriam::dsl {

struct SourcePos {
    int line = 0;
    int col = 0;
};

class DslError : public std::runtime_error {
public:
    DslError(const SourcePos& pos, const std::string& msg)
        : std::runtime_error(std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + msg),
          pos(pos) {}
    SourcePos pos;
};

// ---- AST ----

enum class BinOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };
enum class UnOp { Neg, Not };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { IntLit, Var, ArrayRef, Binary, Unary } kind;
    SourcePos pos;
    long long value = 0;        // IntLit
    std::string name;           // Var, ArrayRef
    ExprPtr index;              // ArrayRef
    BinOp bop = BinOp::Add;     // Binary
    UnOp uop = UnOp::Neg;       // Unary
    ExprPtr lhs, rhs;           // Binary; Unary uses lhs
};

ExprPtr make_int(long long v);
ExprPtr make_var(const std::string& name);
ExprPtr make_array_ref(const std::string& name, ExprPtr index);
ExprPtr make_binary(BinOp op, ExprPtr l, ExprPtr r);
ExprPtr make_unary(UnOp op, ExprPtr e);

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Stmt {
    enum class Kind { VarDecl, Assign, Store, If, For } kind;
    SourcePos pos;
    std::string name;                 // VarDecl/Assign var, Store array, For loop var
    ExprPtr expr;                     // init / rhs / stored value
    ExprPtr index;                    // Store index
    ExprPtr cond;                     // If / For condition
    ExprPtr step;                     // For step rhs (assigned to loop var)
    std::vector<StmtPtr> body;        // If-then / For body
    std::vector<StmtPtr> else_body;   // If-else
};

enum class ParamDir { In, Out, InOut, Scalar };

struct Param {
    std::string name;
    ParamDir dir = ParamDir::In;
    bool is_array() const { return dir != ParamDir::Scalar; }
};

struct KernelAst {
    std::string name;
    std::vector<Param> params;
    std::vector<StmtPtr> body;
};

// ---- Parser / printer ----

/// Parse one kernel definition. Throws DslError with position on syntax
/// errors, unknown identifiers and statically unbounded loops.
KernelAst parse_kernel(const std::string& source);

std::string to_source(const KernelAst& ast);

// ---- Interpreter ----

enum class IndexMode { Computation, Memory };

struct LaunchConfig {
    int grid_size = 1;           // dispatched blocks
    int block_size = 1;          // dispatched threads per block
    int shard_start = 0;         // logical block offset
    int logical_grid_size = 1;   // original M
    int logical_block_size = 1;  // original threads per block
    IndexMode index_mode = IndexMode::Computation;
};

using Arrays = std::map<std::string, std::vector<long long>>;
using Scalars = std::map<std::string, long long>;

struct InterpretResult {
    Arrays outputs;  // out and inout arrays after execution
    std::vector<std::string> warnings;  // e.g. duplicate writes from different threads
};

/// Execute every (block, thread) pair sequentially in row-major order.
/// `inputs` must contain every array parameter (out arrays define their
/// length and initial contents). Out-of-bounds access throws DslError
/// naming the array and index.
InterpretResult interpret(const KernelAst& ast, const LaunchConfig& cfg, const Arrays& inputs,
                          const Scalars& scalars = {});

// ---- Elasticizing transformer ----

/// Source-to-source rewrite: persistent-thread loop plus substitution of
/// physical thread identifiers with logical equivalents. In Memory mode
/// the (logical thread, logical block) pair is fetched from a
/// host-precomputed index table instead of computed in-kernel.
KernelAst elasticize(const KernelAst& ast, IndexMode mode = IndexMode::Computation);

// ---- Equivalence oracle ----

struct EquivalenceEntry {
    std::vector<int> plan;  // shard sizes, in dispatch order
    int elastic_block_size = 0;
    bool pass = false;
    std::string detail;
};

struct EquivalenceReport {
    std::vector<EquivalenceEntry> entries;
    bool all_pass = true;
};

/// Runs the original kernel at (M, B) and, for every shard plan and every
/// elastic block size (warp multiples up to B), the union of elastic shard
/// outputs; compares bit-exactly. Plans must partition [0, M).
EquivalenceReport verify_equivalence(const KernelAst& original, const KernelAst& elastic,
                                     int m, int b, const std::vector<std::vector<int>>& shard_plans,
                                     const Arrays& inputs, const Scalars& scalars = {},
                                     int warp_size = 32);

/// Seeded random contents for the `in` arrays of a kernel; `out`/`inout`
/// arrays are zero-filled at the given lengths.
Arrays make_random_inputs(const KernelAst& ast, const std::map<std::string, int>& lengths,
                          std::uint64_t seed);

}  // namespace miriam::dsl
