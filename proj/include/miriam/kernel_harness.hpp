#pragma once

#include <map>
#include <string>

#include "miriam/dsl.hpp"

namespace miriam::dsl {

/// A kernel source file plus its harness directives:
///   // len <array> = <expr>
///   // set <scalar> = <expr>
/// where <expr> is a product of integer literals, M and B.
struct KernelFile {
    KernelAst ast;
    std::string source;
    std::map<std::string, std::string> array_lengths;  // array -> expr
    std::map<std::string, std::string> scalar_values;  // scalar -> expr
    int default_m = 8;
    int default_b = 64;

    std::map<std::string, int> lengths(int m, int b) const;
    Scalars scalars(int m, int b) const;
};

long long eval_harness_expr(const std::string& expr, int m, int b);

KernelFile load_kernel_file(const std::string& path);
KernelFile parse_kernel_file(const std::string& text);

}  // namespace miriam::dsl
