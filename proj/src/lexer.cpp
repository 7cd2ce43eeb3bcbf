#include "spdc/lexer.hpp"

#include <cctype>

namespace spdc {

std::string_view token_kind_name(TokenKind k) {
    switch (k) {
        case TokenKind::Ident: return "identifier";
        case TokenKind::Number: return "number";
        case TokenKind::SizedNumber: return "sized literal";
        case TokenKind::LParen: return "'('";
        case TokenKind::RParen: return "')'";
        case TokenKind::LBracket: return "'['";
        case TokenKind::RBracket: return "']'";
        case TokenKind::Less: return "'<'";
        case TokenKind::Greater: return "'>'";
        case TokenKind::Comma: return "','";
        case TokenKind::Dot: return "'.'";
        case TokenKind::Colon: return "':'";
        case TokenKind::Semi: return "';'";
        case TokenKind::Assign: return "'='";
        case TokenKind::Plus: return "'+'";
        case TokenKind::Minus: return "'-'";
        case TokenKind::Star: return "'*'";
        case TokenKind::Slash: return "'/'";
        case TokenKind::Newline: return "end of line";
        case TokenKind::End: return "end of file";
    }
    return "?";
}

namespace {

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r') {
                advance();
                continue;
            }
            if (c == '#') {
                skip_comment();
                continue;
            }
            if (c == '\\') {
                consume_continuation();
                continue;
            }
            if (c == '\n') {
                // Collapse a run of line breaks into one terminator.
                if (out.empty() || out.back().kind == TokenKind::Newline) {
                    advance_newline();
                } else {
                    out.push_back(make(TokenKind::Newline, "\n"));
                    advance_newline();
                }
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                out.push_back(lex_ident());
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                out.push_back(lex_number());
                continue;
            }
            out.push_back(lex_punct());
        }
        if (!out.empty() && out.back().kind != TokenKind::Newline)
            out.push_back(make(TokenKind::Newline, "\n"));
        out.push_back(make(TokenKind::End, ""));
        return out;
    }

private:
    Token make(TokenKind k, std::string text) const {
        Token t;
        t.kind = k;
        t.text = std::move(text);
        t.loc = SourceLoc{line_, col_};
        return t;
    }

    void advance() {
        ++pos_;
        ++col_;
    }

    void advance_newline() {
        ++pos_;
        ++line_;
        col_ = 1;
    }

    void skip_comment() {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
    }

    void consume_continuation() {
        SourceLoc at{line_, col_};
        advance();  // the backslash
        while (pos_ < src_.size() &&
               (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\r'))
            advance();
        if (pos_ < src_.size() && src_[pos_] == '#') skip_comment();
        if (pos_ >= src_.size()) return;
        if (src_[pos_] != '\n')
            fail(Errc::IllegalCharacter, at,
                 "'\\' is only allowed at the end of a line");
        advance_newline();
    }

    Token lex_ident() {
        SourceLoc at{line_, col_};
        size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '_'))
            advance();
        Token t;
        t.kind = TokenKind::Ident;
        t.text = std::string(src_.substr(start, pos_ - start));
        t.loc = at;
        return t;
    }

    Token lex_number() {
        SourceLoc at{line_, col_};
        size_t start = pos_;
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_])))
            advance();
        // Sized literal: width digits, then ' and a base code, e.g. 3'b011.
        if (pos_ < src_.size() && src_[pos_] == '\'') {
            advance();
            if (pos_ >= src_.size() ||
                !std::isalpha(static_cast<unsigned char>(src_[pos_])))
                fail(Errc::BadNumber, at, "malformed sized literal");
            advance();  // base character (b, h, d, o)
            size_t digits = 0;
            while (pos_ < src_.size() &&
                   std::isalnum(static_cast<unsigned char>(src_[pos_]))) {
                advance();
                ++digits;
            }
            if (digits == 0)
                fail(Errc::BadNumber, at, "sized literal has no digits");
            Token t;
            t.kind = TokenKind::SizedNumber;
            t.text = std::string(src_.substr(start, pos_ - start));
            t.loc = at;
            return t;
        }
        if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
            std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
            advance();
            while (pos_ < src_.size() &&
                   std::isdigit(static_cast<unsigned char>(src_[pos_])))
                advance();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            size_t save_pos = pos_;
            int save_col = col_;
            advance();
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
                advance();
            if (pos_ < src_.size() &&
                std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() &&
                       std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    advance();
            } else {
                pos_ = save_pos;  // bare `e` belongs to a following identifier
                col_ = save_col;
            }
        }
        Token t;
        t.kind = TokenKind::Number;
        t.text = std::string(src_.substr(start, pos_ - start));
        t.loc = at;
        return t;
    }

    Token lex_punct() {
        char c = src_[pos_];
        TokenKind k;
        switch (c) {
            case '(': k = TokenKind::LParen; break;
            case ')': k = TokenKind::RParen; break;
            case '[': k = TokenKind::LBracket; break;
            case ']': k = TokenKind::RBracket; break;
            case '<': k = TokenKind::Less; break;
            case '>': k = TokenKind::Greater; break;
            case ',': k = TokenKind::Comma; break;
            case '.': k = TokenKind::Dot; break;
            case ':': k = TokenKind::Colon; break;
            case ';': k = TokenKind::Semi; break;
            case '=': k = TokenKind::Assign; break;
            case '+': k = TokenKind::Plus; break;
            case '-': k = TokenKind::Minus; break;
            case '*': k = TokenKind::Star; break;
            case '/': k = TokenKind::Slash; break;
            default:
                fail(Errc::IllegalCharacter, SourceLoc{line_, col_},
                     std::string("unexpected character '") + c + "'");
        }
        Token t = make(k, std::string(1, c));
        advance();
        return t;
    }

    std::string_view src_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) {
    return Lexer(source).run();
}

}  // namespace spdc
