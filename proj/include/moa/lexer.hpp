#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "moa/diag.hpp"

namespace moa {

enum class Tok {
    Eof,
    Ident,
    IntLit,
    // keywords
    KwClass, KwFn, KwVirtual, KwImport, KwIf, KwElse, KwWhile, KwReturn,
    KwNew, KwDowncast, KwCast, KwTrue, KwFalse, KwThis,
    KwI8, KwI32, KwU8, KwU32, KwBool, KwVar, KwTag, KwBuf,
    // punctuation / operators
    LParen, RParen, LBrace, RBrace, Comma, Semi, Colon, Dot, Arrow,
    Assign, Eq, Ne, Lt, Le, Gt, Ge, Plus, Minus, Star, Slash, Bang, Amp,
};

struct Token {
    Tok kind = Tok::Eof;
    std::string text;   // identifier spelling / literal digits
    int64_t ival = 0;   // IntLit
    SourceLoc loc;
};

// Lexes the whole buffer. On a bad character a diagnostic is appended and the
// character is skipped; the token stream always ends with Eof.
std::vector<Token> lex(const std::string& source, const std::string& file, DiagList& diags);

const char* tok_name(Tok k);

}  // namespace moa
