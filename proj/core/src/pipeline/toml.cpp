#include "toml.hpp"

#include "synact/error.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace synact::toml {
namespace {

using json = nlohmann::json;

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    json run() {
        json root = json::object();
        json* table = &root;
        while (true) {
            skip_ws_comments_newlines();
            if (eof()) break;
            if (peek() == '[') {
                table = header(root);
            } else {
                key_value(*table);
            }
            end_of_line();
        }
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_); }

    bool eof() const { return pos_ >= s_.size(); }
    char peek(std::size_t ahead = 0) const { return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0'; }
    char get() {
        const char c = s_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }

    void skip_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
    }
    void skip_comment() {
        if (peek() == '#')
            while (!eof() && peek() != '\n') ++pos_;
    }
    void skip_ws_comments_newlines() {
        while (!eof()) {
            skip_ws();
            skip_comment();
            if (peek() == '\n') {
                get();
            } else if (peek() == '\r' && peek(1) == '\n') {
                ++pos_;
                get();
            } else {
                break;
            }
        }
    }
    void end_of_line() {
        skip_ws();
        skip_comment();
        if (eof()) return;
        if (peek() == '\r') ++pos_;
        if (peek() != '\n') fail("expected end of line");
        get();
    }

    static bool bare_char(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    }

    std::string simple_key() {
        skip_ws();
        if (peek() == '"') return basic_string();
        if (peek() == '\'') return literal_string();
        std::string k;
        while (!eof() && bare_char(peek())) k += get();
        if (k.empty()) fail("expected a key");
        return k;
    }

    std::vector<std::string> dotted_key() {
        std::vector<std::string> parts{simple_key()};
        skip_ws();
        while (peek() == '.') {
            ++pos_;
            parts.push_back(simple_key());
            skip_ws();
        }
        return parts;
    }

    json* descend(json& root, const std::vector<std::string>& path, std::size_t count) {
        json* cur = &root;
        for (std::size_t i = 0; i < count; ++i) {
            json& next = (*cur)[path[i]];
            if (next.is_null()) next = json::object();
            if (next.is_array()) {
                if (next.empty() || !next.back().is_object()) fail("key '" + path[i] + "' is not a table");
                cur = &next.back();
            } else if (next.is_object()) {
                cur = &next;
            } else {
                fail("key '" + path[i] + "' is not a table");
            }
        }
        return cur;
    }

    json* header(json& root) {
        ++pos_;
        const bool array = peek() == '[';
        if (array) ++pos_;
        auto path = dotted_key();
        if (get() != ']' || (array && (eof() || get() != ']'))) fail("malformed table header");
        json* parent = descend(root, path, path.size() - 1);
        json& slot = (*parent)[path.back()];
        if (array) {
            if (slot.is_null()) slot = json::array();
            if (!slot.is_array()) fail("'" + path.back() + "' is already defined as a table");
            slot.push_back(json::object());
            return &slot.back();
        }
        if (slot.is_null()) slot = json::object();
        if (!slot.is_object()) fail("'" + path.back() + "' is already defined");
        return &slot;
    }

    void key_value(json& table) {
        auto path = dotted_key();
        skip_ws();
        if (eof() || get() != '=') fail("expected '=' after key");
        skip_ws();
        json v = value();
        json* target = descend(table, path, path.size() - 1);
        if (target->contains(path.back())) fail("duplicate key '" + path.back() + "'");
        (*target)[path.back()] = std::move(v);
    }

    json value() {
        const char c = peek();
        if (c == '"') {
            if (peek(1) == '"' && peek(2) == '"') throw UnsupportedFeatureError("multi-line strings are not supported");
            return basic_string();
        }
        if (c == '\'') {
            if (peek(1) == '\'' && peek(2) == '\'') throw UnsupportedFeatureError("multi-line strings are not supported");
            return literal_string();
        }
        if (c == '[') return array();
        if (c == '{') return inline_table();
        if (s_.substr(pos_, 4) == "true" && !bare_char(peek(4))) {
            pos_ += 4;
            return true;
        }
        if (s_.substr(pos_, 5) == "false" && !bare_char(peek(5))) {
            pos_ += 5;
            return false;
        }
        return number();
    }

    json array() {
        ++pos_;
        json arr = json::array();
        while (true) {
            skip_ws_comments_newlines();
            if (peek() == ']') {
                ++pos_;
                return arr;
            }
            arr.push_back(value());
            skip_ws_comments_newlines();
            if (peek() == ',') {
                ++pos_;
            } else if (peek() == ']') {
                ++pos_;
                return arr;
            } else {
                fail("expected ',' or ']' in array");
            }
        }
    }

    json inline_table() {
        ++pos_;
        json t = json::object();
        skip_ws();
        if (peek() == '}') {
            ++pos_;
            return t;
        }
        while (true) {
            key_value(t);
            skip_ws();
            const char c = eof() ? '\0' : get();
            if (c == '}') return t;
            if (c != ',') fail("expected ',' or '}' in inline table");
        }
    }

    std::string basic_string() {
        ++pos_;
        std::string out;
        while (true) {
            if (eof() || peek() == '\n') fail("unterminated string");
            const char c = get();
            if (c == '"') return out;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (eof()) fail("unterminated escape");
            const char e = get();
            switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                case 'b': out += '\b'; break;
                case 'f': out += '\f'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'u':
                case 'U': {
                    const int n = e == 'u' ? 4 : 8;
                    if (pos_ + static_cast<std::size_t>(n) > s_.size()) fail("truncated unicode escape");
                    std::uint32_t cp = 0;
                    for (int i = 0; i < n; ++i) {
                        const char h = get();
                        cp <<= 4;
                        if (h >= '0' && h <= '9') cp |= static_cast<std::uint32_t>(h - '0');
                        else if (h >= 'a' && h <= 'f') cp |= static_cast<std::uint32_t>(h - 'a' + 10);
                        else if (h >= 'A' && h <= 'F') cp |= static_cast<std::uint32_t>(h - 'A' + 10);
                        else fail("bad unicode escape");
                    }
                    append_utf8(out, cp);
                    break;
                }
                default: fail(std::string("unknown escape \\") + e);
            }
        }
    }

    static void append_utf8(std::string& out, std::uint32_t cp) {
        if (cp < 0x80) {
            out += static_cast<char>(cp);
        } else if (cp < 0x800) {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x10000) {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (cp >> 18));
            out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
    }

    std::string literal_string() {
        ++pos_;
        std::string out;
        while (true) {
            if (eof() || peek() == '\n') fail("unterminated string");
            const char c = get();
            if (c == '\'') return out;
            out += c;
        }
    }

    json number() {
        std::string tok;
        while (!eof() && (bare_char(peek()) || peek() == '.' || peek() == '+' || peek() == ':')) tok += get();
        if (tok.empty()) fail("expected a value");
        if (tok.find(':') != std::string::npos || (tok.size() >= 10 && tok[4] == '-' && tok[7] == '-'))
            throw UnsupportedFeatureError("dates and times are not supported");
        std::string t;
        for (std::size_t i = 0; i < tok.size(); ++i) {
            if (tok[i] == '_') {
                if (i == 0 || i + 1 == tok.size() || !std::isalnum(static_cast<unsigned char>(tok[i - 1])) ||
                    !std::isalnum(static_cast<unsigned char>(tok[i + 1])))
                    fail("misplaced underscore in number");
                continue;
            }
            t += tok[i];
        }
        std::string body = t;
        double sign = 1.0;
        if (!body.empty() && (body[0] == '+' || body[0] == '-')) {
            sign = body[0] == '-' ? -1.0 : 1.0;
            body = body.substr(1);
        }
        if (body == "inf") return sign * std::numeric_limits<double>::infinity();
        if (body == "nan") return std::numeric_limits<double>::quiet_NaN();
        try {
            if (body.size() > 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'o' || body[1] == 'b')) {
                if (t[0] == '+' || t[0] == '-') fail("signed prefixed integers are not allowed");
                const int base = body[1] == 'x' ? 16 : body[1] == 'o' ? 8 : 2;
                std::size_t used = 0;
                const unsigned long long v = std::stoull(body.substr(2), &used, base);
                if (used != body.size() - 2) fail("bad integer '" + tok + "'");
                if (v > static_cast<unsigned long long>(std::numeric_limits<std::int64_t>::max()))
                    return static_cast<std::uint64_t>(v);
                return static_cast<std::int64_t>(v);
            }
            const bool is_float = body.find_first_of(".eE") != std::string::npos;
            if (body.empty() || !std::isdigit(static_cast<unsigned char>(body[0]))) fail("bad value '" + tok + "'");
            if (body.size() > 1 && body[0] == '0' && std::isdigit(static_cast<unsigned char>(body[1])))
                fail("leading zeros are not allowed");
            std::size_t used = 0;
            if (is_float) {
                const double v = std::stod(t, &used);
                if (used != t.size()) fail("bad float '" + tok + "'");
                return v;
            }
            if (sign > 0) {
                const unsigned long long v = std::stoull(body, &used, 10);
                if (used != body.size()) fail("bad integer '" + tok + "'");
                if (v > static_cast<unsigned long long>(std::numeric_limits<std::int64_t>::max()))
                    return static_cast<std::uint64_t>(v);
                return static_cast<std::int64_t>(v);
            }
            const long long v = std::stoll(t, &used, 10);
            if (used != t.size()) fail("bad integer '" + tok + "'");
            return static_cast<std::int64_t>(v);
        } catch (const std::out_of_range&) {
            fail("number out of range '" + tok + "'");
        } catch (const std::invalid_argument&) {
            fail("bad value '" + tok + "'");
        }
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

}  // namespace

nlohmann::json parse(std::string_view text) { return Parser(text).run(); }

}  // namespace synact::toml
