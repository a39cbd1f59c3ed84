#include "miriam/kernel_harness.hpp"

#include <fstream>
#include <sstream>

namespace miriam::dsl {

long long eval_harness_expr(const std::string& expr, int m, int b) {
    long long result = 1;
    std::string tok;
    std::istringstream ss(expr);
    bool any = false;
    while (std::getline(ss, tok, '*')) {
        const auto a = tok.find_first_not_of(" \t");
        const auto z = tok.find_last_not_of(" \t");
        if (a == std::string::npos) throw std::runtime_error("bad harness expression: " + expr);
        tok = tok.substr(a, z - a + 1);
        any = true;
        if (tok == "M") result *= m;
        else if (tok == "B") result *= b;
        else result *= std::stoll(tok);
    }
    if (!any) throw std::runtime_error("empty harness expression");
    return result;
}

std::map<std::string, int> KernelFile::lengths(int m, int b) const {
    std::map<std::string, int> out;
    for (const auto& [name, expr] : array_lengths)
        out[name] = static_cast<int>(eval_harness_expr(expr, m, b));
    return out;
}

Scalars KernelFile::scalars(int m, int b) const {
    Scalars out;
    for (const auto& [name, expr] : scalar_values)
        out[name] = eval_harness_expr(expr, m, b);
    return out;
}

KernelFile parse_kernel_file(const std::string& text) {
    KernelFile kf;
    kf.source = text;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto pos = line.find("//");
        if (pos == std::string::npos) continue;
        std::istringstream ss(line.substr(pos + 2));
        std::string kw, name, eq;
        if (!(ss >> kw)) continue;
        if (kw != "len" && kw != "set" && kw != "grid" && kw != "block") continue;
        if (kw == "grid" || kw == "block") {
            int v;
            std::string e;
            if (ss >> e >> v && e == "=") (kw == "grid" ? kf.default_m : kf.default_b) = v;
            continue;
        }
        std::string expr;
        if (!(ss >> name >> eq) || eq != "=") continue;
        std::getline(ss, expr);
        if (kw == "len") kf.array_lengths[name] = expr;
        else kf.scalar_values[name] = expr;
    }
    kf.ast = parse_kernel(text);
    return kf;
}

KernelFile load_kernel_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open kernel file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_kernel_file(buf.str());
}

}  // namespace miriam::dsl
