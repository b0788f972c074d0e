#include "moa/lexer.hpp"

#include <cctype>
#include <map>

namespace moa {

const char* tok_name(Tok k) {
    switch (k) {
        case Tok::Eof: return "end of file";
        case Tok::Ident: return "identifier";
        case Tok::IntLit: return "integer literal";
        case Tok::KwClass: return "'class'";
        case Tok::KwFn: return "'fn'";
        case Tok::KwVirtual: return "'virtual'";
        case Tok::KwImport: return "'import'";
        case Tok::KwIf: return "'if'";
        case Tok::KwElse: return "'else'";
        case Tok::KwWhile: return "'while'";
        case Tok::KwReturn: return "'return'";
        case Tok::KwNew: return "'new'";
        case Tok::KwDowncast: return "'downcast'";
        case Tok::KwCast: return "'cast'";
        case Tok::KwTrue: return "'true'";
        case Tok::KwFalse: return "'false'";
        case Tok::KwThis: return "'this'";
        case Tok::KwI8: return "'i8'";
        case Tok::KwI32: return "'i32'";
        case Tok::KwU8: return "'u8'";
        case Tok::KwU32: return "'u32'";
        case Tok::KwBool: return "'bool'";
        case Tok::KwVar: return "'var'";
        case Tok::KwTag: return "'tag'";
        case Tok::KwBuf: return "'buf'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::Comma: return "','";
        case Tok::Semi: return "';'";
        case Tok::Colon: return "':'";
        case Tok::Dot: return "'.'";
        case Tok::Arrow: return "'->'";
        case Tok::Assign: return "'='";
        case Tok::Eq: return "'=='";
        case Tok::Ne: return "'!='";
        case Tok::Lt: return "'<'";
        case Tok::Le: return "'<='";
        case Tok::Gt: return "'>'";
        case Tok::Ge: return "'>='";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Bang: return "'!'";
        case Tok::Amp: return "'&'";
    }
    return "?";
}

static const std::map<std::string, Tok>& keywords() {
    static const std::map<std::string, Tok> kw = {
        {"class", Tok::KwClass},   {"fn", Tok::KwFn},         {"virtual", Tok::KwVirtual},
        {"import", Tok::KwImport}, {"if", Tok::KwIf},         {"else", Tok::KwElse},
        {"while", Tok::KwWhile},   {"return", Tok::KwReturn}, {"new", Tok::KwNew},
        {"downcast", Tok::KwDowncast}, {"cast", Tok::KwCast}, {"true", Tok::KwTrue},
        {"false", Tok::KwFalse},   {"this", Tok::KwThis},     {"i8", Tok::KwI8},
        {"i32", Tok::KwI32},       {"u8", Tok::KwU8},         {"u32", Tok::KwU32},
        {"bool", Tok::KwBool},     {"var", Tok::KwVar},       {"tag", Tok::KwTag},
        {"buf", Tok::KwBuf},
    };
    return kw;
}

std::vector<Token> lex(const std::string& src, const std::string& file, DiagList& diags) {
    std::vector<Token> out;
    size_t i = 0;
    int line = 1, col = 1;

    auto loc_here = [&] { return SourceLoc{file, line, col}; };
    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto push = [&](Tok k, SourceLoc l, std::string text = {}) {
        Token t;
        t.kind = k;
        t.text = std::move(text);
        t.loc = std::move(l);
        out.push_back(std::move(t));
    };

    while (i < src.size()) {
        char c = src[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        SourceLoc l = loc_here();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            std::string word = src.substr(i, j - i);
            advance(j - i);
            auto it = keywords().find(word);
            if (it != keywords().end())
                push(it->second, l, word);
            else
                push(Tok::Ident, l, word);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            std::string digits = src.substr(i, j - i);
            advance(j - i);
            Token t;
            t.kind = Tok::IntLit;
            t.text = digits;
            t.loc = l;
            errno = 0;
            try {
                t.ival = std::stoll(digits);
            } catch (...) {
                diags.push_back({l, "integer literal out of range"});
                t.ival = 0;
            }
            out.push_back(std::move(t));
            continue;
        }
        auto two = [&](char a, char b) {
            return c == a && i + 1 < src.size() && src[i + 1] == b;
        };
        if (two('-', '>')) { push(Tok::Arrow, l); advance(2); continue; }
        if (two('=', '=')) { push(Tok::Eq, l); advance(2); continue; }
        if (two('!', '=')) { push(Tok::Ne, l); advance(2); continue; }
        if (two('<', '=')) { push(Tok::Le, l); advance(2); continue; }
        if (two('>', '=')) { push(Tok::Ge, l); advance(2); continue; }
        switch (c) {
            case '(': push(Tok::LParen, l); advance(1); continue;
            case ')': push(Tok::RParen, l); advance(1); continue;
            case '{': push(Tok::LBrace, l); advance(1); continue;
            case '}': push(Tok::RBrace, l); advance(1); continue;
            case ',': push(Tok::Comma, l); advance(1); continue;
            case ';': push(Tok::Semi, l); advance(1); continue;
            case ':': push(Tok::Colon, l); advance(1); continue;
            case '.': push(Tok::Dot, l); advance(1); continue;
            case '=': push(Tok::Assign, l); advance(1); continue;
            case '<': push(Tok::Lt, l); advance(1); continue;
            case '>': push(Tok::Gt, l); advance(1); continue;
            case '+': push(Tok::Plus, l); advance(1); continue;
            case '-': push(Tok::Minus, l); advance(1); continue;
            case '*': push(Tok::Star, l); advance(1); continue;
            case '/': push(Tok::Slash, l); advance(1); continue;
            case '!': push(Tok::Bang, l); advance(1); continue;
            case '&': push(Tok::Amp, l); advance(1); continue;
            default:
                diags.push_back({l, std::string("unexpected character '") + c + "'"});
                advance(1);
                continue;
        }
    }
    push(Tok::Eof, loc_here());
    return out;
}

}  // namespace moa
