#include "miriam/dsl.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace miriam::dsl {

ExprPtr make_int(long long v) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::IntLit;
    e->value = v;
    return e;
}

ExprPtr make_var(const std::string& name) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Var;
    e->name = name;
    return e;
}

ExprPtr make_array_ref(const std::string& name, ExprPtr index) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::ArrayRef;
    e->name = name;
    e->index = std::move(index);
    return e;
}

ExprPtr make_binary(BinOp op, ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Binary;
    e->bop = op;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
}

ExprPtr make_unary(UnOp op, ExprPtr inner) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Unary;
    e->uop = op;
    e->lhs = std::move(inner);
    return e;
}

namespace {

const std::set<std::string> kPhysicalBuiltins = {"threadIdx.x", "blockIdx.x", "blockDim.x",
                                                 "gridDim.x"};
const std::set<std::string> kLaunchScalars = {"__shard_start", "__logical_grid_dim",
                                              "__logical_block_dim"};
const std::string kIndexTable = "__idx_table";

struct Token {
    enum class Kind { Ident, Int, Punct, End } kind;
    std::string text;
    long long value = 0;
    SourcePos pos;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) { next(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        next();
        return t;
    }

private:
    void next() {
        skip_space();
        tok_.pos = {line_, col_};
        if (i_ >= src_.size()) {
            tok_.kind = Token::Kind::End;
            tok_.text = "<end of input>";
            return;
        }
        const char c = src_[i_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string s;
            while (i_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_'))
                s += advance();
            // threadIdx.x style builtins are single tokens
            if (i_ + 1 < src_.size() && src_[i_] == '.' && src_[i_ + 1] == 'x' &&
                kPhysicalBuiltins.count(s + ".x")) {
                advance();
                advance();
                s += ".x";
            }
            tok_.kind = Token::Kind::Ident;
            tok_.text = s;
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string s;
            while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_])))
                s += advance();
            tok_.kind = Token::Kind::Int;
            tok_.text = s;
            tok_.value = std::stoll(s);
            return;
        }
        // multi-char operators
        static const char* two[] = {"<=", ">=", "==", "!=", "&&", "||"};
        for (const char* op : two) {
            if (src_.compare(i_, 2, op) == 0) {
                tok_.kind = Token::Kind::Punct;
                tok_.text = op;
                advance();
                advance();
                return;
            }
        }
        tok_.kind = Token::Kind::Punct;
        tok_.text = std::string(1, advance());
    }

    void skip_space() {
        for (;;) {
            while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) advance();
            if (i_ + 1 < src_.size() && src_[i_] == '/' && src_[i_ + 1] == '/') {
                while (i_ < src_.size() && src_[i_] != '\n') advance();
                continue;
            }
            break;
        }
    }

    char advance() {
        const char c = src_[i_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    const std::string& src_;
    std::size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token tok_;
};

class Parser {
public:
    explicit Parser(const std::string& src) : lex_(src) {}

    KernelAst parse() {
        expect_ident("kernel");
        KernelAst k;
        k.name = expect_name();
        expect_punct("(");
        if (!is_punct(")")) {
            for (;;) {
                k.params.push_back(parse_param());
                if (is_punct(",")) {
                    lex_.take();
                    continue;
                }
                break;
            }
        }
        expect_punct(")");
        for (const auto& p : k.params) {
            if (p.is_array()) arrays_.insert(p.name);
            else scalars_.insert(p.name);
        }
        k.body = parse_block();
        const Token& t = lex_.peek();
        if (t.kind != Token::Kind::End)
            throw DslError(t.pos, "unexpected trailing input: " + t.text);
        return k;
    }

private:
    Param parse_param() {
        const Token t = lex_.take();
        if (t.kind != Token::Kind::Ident)
            throw DslError(t.pos, "expected parameter direction, got " + t.text);
        Param p;
        if (t.text == "in") p.dir = ParamDir::In;
        else if (t.text == "out") p.dir = ParamDir::Out;
        else if (t.text == "inout") p.dir = ParamDir::InOut;
        else if (t.text == "scalar") p.dir = ParamDir::Scalar;
        else throw DslError(t.pos, "expected in/out/inout/scalar, got " + t.text);
        p.name = expect_name();
        if (p.dir != ParamDir::Scalar) {
            expect_punct("[");
            expect_punct("]");
        }
        return p;
    }

    std::vector<StmtPtr> parse_block() {
        expect_punct("{");
        std::vector<StmtPtr> body;
        while (!is_punct("}")) body.push_back(parse_stmt());
        expect_punct("}");
        return body;
    }

    StmtPtr parse_stmt() {
        const Token& t = lex_.peek();
        if (t.kind != Token::Kind::Ident)
            throw DslError(t.pos, "expected statement, got " + t.text);
        if (t.text == "var") return parse_var_decl();
        if (t.text == "if") return parse_if();
        if (t.text == "for") return parse_for();
        return parse_assign_or_store();
    }

    StmtPtr parse_var_decl() {
        auto s = std::make_shared<Stmt>();
        s->pos = lex_.peek().pos;
        s->kind = Stmt::Kind::VarDecl;
        lex_.take();  // var
        s->name = expect_name();
        expect_punct("=");
        s->expr = parse_expr();
        expect_punct(";");
        scalars_.insert(s->name);
        return s;
    }

    StmtPtr parse_assign_or_store() {
        auto s = std::make_shared<Stmt>();
        const Token name = lex_.take();
        s->pos = name.pos;
        s->name = name.text;
        if (is_punct("[")) {
            lex_.take();
            s->kind = Stmt::Kind::Store;
            if (!arrays_.count(s->name))
                throw DslError(name.pos, "unknown array: " + s->name);
            s->index = parse_expr();
            expect_punct("]");
            expect_punct("=");
            s->expr = parse_expr();
            expect_punct(";");
            return s;
        }
        s->kind = Stmt::Kind::Assign;
        if (!scalars_.count(s->name))
            throw DslError(name.pos, "unknown variable: " + s->name);
        expect_punct("=");
        s->expr = parse_expr();
        expect_punct(";");
        return s;
    }

    StmtPtr parse_if() {
        auto s = std::make_shared<Stmt>();
        s->pos = lex_.peek().pos;
        s->kind = Stmt::Kind::If;
        lex_.take();  // if
        expect_punct("(");
        s->cond = parse_expr();
        expect_punct(")");
        s->body = parse_block();
        if (lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == "else") {
            lex_.take();
            s->else_body = parse_block();
        }
        return s;
    }

    StmtPtr parse_for() {
        auto s = std::make_shared<Stmt>();
        s->pos = lex_.peek().pos;
        s->kind = Stmt::Kind::For;
        lex_.take();  // for
        expect_punct("(");
        expect_ident("var");
        s->name = expect_name();
        scalars_.insert(s->name);
        expect_punct("=");
        s->expr = parse_expr();  // init
        expect_punct(";");
        s->cond = parse_expr();
        expect_punct(";");
        const Token step_var = lex_.take();
        if (step_var.kind != Token::Kind::Ident || step_var.text != s->name)
            throw DslError(step_var.pos,
                           "unbounded loop: step must assign the loop variable " + s->name);
        expect_punct("=");
        s->step = parse_expr();
        expect_punct(")");
        s->body = parse_block();
        return s;
    }

    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr e = parse_and();
        while (is_punct("||")) {
            lex_.take();
            e = make_binary(BinOp::Or, e, parse_and());
        }
        return e;
    }

    ExprPtr parse_and() {
        ExprPtr e = parse_cmp();
        while (is_punct("&&")) {
            lex_.take();
            e = make_binary(BinOp::And, e, parse_cmp());
        }
        return e;
    }

    ExprPtr parse_cmp() {
        ExprPtr e = parse_add();
        for (;;) {
            BinOp op;
            if (is_punct("<")) op = BinOp::Lt;
            else if (is_punct("<=")) op = BinOp::Le;
            else if (is_punct(">")) op = BinOp::Gt;
            else if (is_punct(">=")) op = BinOp::Ge;
            else if (is_punct("==")) op = BinOp::Eq;
            else if (is_punct("!=")) op = BinOp::Ne;
            else return e;
            lex_.take();
            e = make_binary(op, e, parse_add());
        }
    }

    ExprPtr parse_add() {
        ExprPtr e = parse_mul();
        for (;;) {
            if (is_punct("+")) {
                lex_.take();
                e = make_binary(BinOp::Add, e, parse_mul());
            } else if (is_punct("-")) {
                lex_.take();
                e = make_binary(BinOp::Sub, e, parse_mul());
            } else {
                return e;
            }
        }
    }

    ExprPtr parse_mul() {
        ExprPtr e = parse_unary();
        for (;;) {
            BinOp op;
            if (is_punct("*")) op = BinOp::Mul;
            else if (is_punct("/")) op = BinOp::Div;
            else if (is_punct("%")) op = BinOp::Mod;
            else return e;
            lex_.take();
            e = make_binary(op, e, parse_unary());
        }
    }

    ExprPtr parse_unary() {
        if (is_punct("-")) {
            lex_.take();
            return make_unary(UnOp::Neg, parse_unary());
        }
        if (is_punct("!")) {
            lex_.take();
            return make_unary(UnOp::Not, parse_unary());
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        const Token t = lex_.take();
        if (t.kind == Token::Kind::Int) {
            auto e = make_int(t.value);
            return e;
        }
        if (t.kind == Token::Kind::Punct && t.text == "(") {
            ExprPtr e = parse_expr();
            expect_punct(")");
            return e;
        }
        if (t.kind != Token::Kind::Ident)
            throw DslError(t.pos, "expected expression, got " + t.text);
        if (is_punct("[")) {
            lex_.take();
            if (!arrays_.count(t.text) && t.text != kIndexTable)
                throw DslError(t.pos, "unknown array: " + t.text);
            ExprPtr idx = parse_expr();
            expect_punct("]");
            return make_array_ref(t.text, idx);
        }
        if (!scalars_.count(t.text) && !kPhysicalBuiltins.count(t.text) &&
            !kLaunchScalars.count(t.text))
            throw DslError(t.pos, "unknown identifier: " + t.text);
        return make_var(t.text);
    }

    bool is_punct(const std::string& p) const {
        return lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == p;
    }

    void expect_punct(const std::string& p) {
        const Token t = lex_.take();
        if (t.kind != Token::Kind::Punct || t.text != p)
            throw DslError(t.pos, "expected '" + p + "', got " + t.text);
    }

    void expect_ident(const std::string& kw) {
        const Token t = lex_.take();
        if (t.kind != Token::Kind::Ident || t.text != kw)
            throw DslError(t.pos, "expected '" + kw + "', got " + t.text);
    }

    std::string expect_name() {
        const Token t = lex_.take();
        if (t.kind != Token::Kind::Ident)
            throw DslError(t.pos, "expected identifier, got " + t.text);
        return t.text;
    }

    Lexer lex_;
    std::set<std::string> arrays_;
    std::set<std::string> scalars_;
};

const char* binop_text(BinOp op) {
    switch (op) {
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Div: return "/";
        case BinOp::Mod: return "%";
        case BinOp::Lt: return "<";
        case BinOp::Le: return "<=";
        case BinOp::Gt: return ">";
        case BinOp::Ge: return ">=";
        case BinOp::Eq: return "==";
        case BinOp::Ne: return "!=";
        case BinOp::And: return "&&";
        case BinOp::Or: return "||";
    }
    return "?";
}

void print_expr(std::ostream& os, const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::IntLit:
            os << e.value;
            break;
        case Expr::Kind::Var:
            os << e.name;
            break;
        case Expr::Kind::ArrayRef:
            os << e.name << "[";
            print_expr(os, *e.index);
            os << "]";
            break;
        case Expr::Kind::Binary:
            os << "(";
            print_expr(os, *e.lhs);
            os << " " << binop_text(e.bop) << " ";
            print_expr(os, *e.rhs);
            os << ")";
            break;
        case Expr::Kind::Unary:
            os << (e.uop == UnOp::Neg ? "(-" : "(!");
            print_expr(os, *e.lhs);
            os << ")";
            break;
    }
}

void print_block(std::ostream& os, const std::vector<StmtPtr>& body, int indent);

void print_stmt(std::ostream& os, const Stmt& s, int indent) {
    const std::string pad(indent * 2, ' ');
    switch (s.kind) {
        case Stmt::Kind::VarDecl:
            os << pad << "var " << s.name << " = ";
            print_expr(os, *s.expr);
            os << ";\n";
            break;
        case Stmt::Kind::Assign:
            os << pad << s.name << " = ";
            print_expr(os, *s.expr);
            os << ";\n";
            break;
        case Stmt::Kind::Store:
            os << pad << s.name << "[";
            print_expr(os, *s.index);
            os << "] = ";
            print_expr(os, *s.expr);
            os << ";\n";
            break;
        case Stmt::Kind::If:
            os << pad << "if (";
            print_expr(os, *s.cond);
            os << ") ";
            print_block(os, s.body, indent);
            if (!s.else_body.empty()) {
                os << pad << "else ";
                print_block(os, s.else_body, indent);
            }
            break;
        case Stmt::Kind::For:
            os << pad << "for (var " << s.name << " = ";
            print_expr(os, *s.expr);
            os << "; ";
            print_expr(os, *s.cond);
            os << "; " << s.name << " = ";
            print_expr(os, *s.step);
            os << ") ";
            print_block(os, s.body, indent);
            break;
    }
}

void print_block(std::ostream& os, const std::vector<StmtPtr>& body, int indent) {
    os << "{\n";
    for (const auto& s : body) print_stmt(os, *s, indent + 1);
    os << std::string(indent * 2, ' ') << "}\n";
}

}  // namespace

KernelAst parse_kernel(const std::string& source) { return Parser(source).parse(); }

std::string to_source(const KernelAst& ast) {
    std::ostringstream os;
    os << "kernel " << ast.name << "(";
    for (std::size_t i = 0; i < ast.params.size(); ++i) {
        const auto& p = ast.params[i];
        if (i) os << ", ";
        switch (p.dir) {
            case ParamDir::In: os << "in " << p.name << "[]"; break;
            case ParamDir::Out: os << "out " << p.name << "[]"; break;
            case ParamDir::InOut: os << "inout " << p.name << "[]"; break;
            case ParamDir::Scalar: os << "scalar " << p.name; break;
        }
    }
    os << ") ";
    print_block(os, ast.body, 0);
    return os.str();
}

}  // namespace miriam::dsl
