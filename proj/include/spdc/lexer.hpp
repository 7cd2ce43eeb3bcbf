#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "spdc/diag.hpp"

namespace spdc {

enum class TokenKind {
    Ident,
    Number,       // decimal integer or float, e.g. 1506 or 0.500
    SizedNumber,  // Verilog-style sized literal, e.g. 3'b011
    LParen,
    RParen,
    LBracket,
    RBracket,
    Less,
    Greater,
    Comma,
    Dot,
    Colon,
    Semi,
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
    Newline,  // statement terminator (continuations already joined)
    End,
};

std::string_view token_kind_name(TokenKind k);

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;  // exact source spelling
    SourceLoc loc;

    bool is(TokenKind k) const { return kind == k; }
};

/// Split SPD source text into tokens.
///
/// `#` starts a comment running to end of line.  A `\` followed only by
/// whitespace (or a comment) before the line break joins the next physical
/// line into the current logical line, so no Newline token is produced for
/// it.  Every other line break produces one Newline token.  Throws
/// CompileError (ILLEGAL_CHARACTER) on bytes outside the language.
std::vector<Token> tokenize(std::string_view source);

}  // namespace spdc
