#include "filterplus/html/tokenizer.hpp"

#include <algorithm>

namespace filterplus::html {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\f' || c == '\r';
}

bool is_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

char lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool is_raw_text_element(std::string_view name) {
    return name == "script" || name == "style" || name == "textarea" || name == "title";
}

bool iprefix_of(std::string_view candidate, std::string_view word) {
    if (candidate.size() > word.size()) {
        return false;
    }
    for (std::size_t i = 0; i < candidate.size(); ++i) {
        if (lower(candidate[i]) != word[i]) {
            return false;
        }
    }
    return true;
}

constexpr std::string_view kCommentOpen = "<!--";
constexpr std::string_view kDoctypeOpen = "<!doctype";

}  // namespace

std::string Token::source() const {
    std::string out;
    append_source(out);
    return out;
}

void Token::append_source(std::string& out) const {
    if (kind == TokenKind::start_tag || kind == TokenKind::end_tag) {
        out += head;
        for (const auto& a : attributes) {
            out += a.source;
        }
        out += tail;
    } else {
        out += data;
    }
}

const char* to_string(TokenKind kind) {
    switch (kind) {
    case TokenKind::start_tag: return "StartTag";
    case TokenKind::end_tag: return "EndTag";
    case TokenKind::text: return "Text";
    case TokenKind::comment: return "Comment";
    case TokenKind::doctype: return "Doctype";
    case TokenKind::raw_text: return "RawText";
    }
    return "?";
}

void Tokenizer::feed(std::string_view chunk, std::vector<Token>& out) {
    std::size_t i = 0;
    while (i < chunk.size()) {
        if (auto n = bulk(chunk.substr(i), out)) {
            i += n;
            continue;
        }
        char c = chunk[i++];
        while (!consume(c, out)) {
        }
    }
    high_water_ = std::max(high_water_, buffered());
}

// Runs of bytes that cannot change the state are copied in one step.
std::size_t Tokenizer::bulk(std::string_view rest, std::vector<Token>& out) {
    auto span_until = [&](char stop) {
        auto pos = rest.find(stop);
        return pos == std::string_view::npos ? rest.size() : pos;
    };
    switch (state_) {
    case State::data: {
        auto n = span_until('<');
        append_text(rest.substr(0, n), out);
        return n;
    }
    case State::raw_text: {
        auto n = span_until('<');
        raw_.append(rest.substr(0, n));
        return n;
    }
    case State::comment:
    case State::doctype:
    case State::bogus_comment: {
        auto n = span_until('>');
        pending_.append(rest.substr(0, n));
        return n;
    }
    case State::attribute_value_double:
    case State::attribute_value_single: {
        auto n = span_until(state_ == State::attribute_value_double ? '"' : '\'');
        seg_.append(rest.substr(0, n));
        attr_.value->append(rest.substr(0, n));
        return n;
    }
    default:
        return 0;
    }
}

// Returns false when `c` must be reprocessed in the new state.
bool Tokenizer::consume(char c, std::vector<Token>& out) {
    switch (state_) {
    case State::data:
        if (c == '<') {
            state_ = State::tag_open;
        } else {
            append_text(std::string_view(&c, 1), out);
        }
        return true;

    case State::tag_open:
        if (is_alpha(c)) {
            flush_text(out);
            begin_tag(false, std::string{'<', c}, std::string(1, lower(c)));
            state_ = State::tag_name;
        } else if (c == '/') {
            state_ = State::end_tag_open;
        } else if (c == '!') {
            pending_ = "<!";
            state_ = State::markup_declaration;
        } else if (c == '?') {
            flush_text(out);
            pending_ = "<?";
            state_ = State::bogus_comment;
        } else {
            append_text("<", out);
            state_ = State::data;
            return false;
        }
        return true;

    case State::end_tag_open:
        flush_text(out);
        if (is_alpha(c)) {
            begin_tag(true, std::string{'<', '/', c}, std::string(1, lower(c)));
            state_ = State::tag_name;
        } else if (c == '>') {
            pending_ = "</>";
            emit_pending(TokenKind::comment, out);
        } else {
            pending_ = "</";
            pending_ += c;
            state_ = State::bogus_comment;
        }
        return true;

    case State::markup_declaration:
        pending_ += c;
        if (pending_ == kCommentOpen) {
            flush_text(out);
            state_ = State::comment;
        } else if (pending_.size() == kDoctypeOpen.size() && iprefix_of(pending_, kDoctypeOpen)) {
            flush_text(out);
            state_ = State::doctype;
        } else if (!kCommentOpen.starts_with(pending_) && !iprefix_of(pending_, kDoctypeOpen)) {
            flush_text(out);
            state_ = State::bogus_comment;
            if (c == '>') {
                emit_pending(TokenKind::comment, out);
            }
        }
        return true;

    case State::comment:
        pending_ += c;
        if (c == '>') {
            std::string_view body = std::string_view(pending_).substr(kCommentOpen.size());
            if (body == ">" || body == "->" || body.ends_with("-->") || body.ends_with("--!>")) {
                emit_pending(TokenKind::comment, out);
            }
        }
        return true;

    case State::doctype:
    case State::bogus_comment:
        pending_ += c;
        if (c == '>') {
            emit_pending(state_ == State::doctype ? TokenKind::doctype : TokenKind::comment, out);
        }
        return true;

    case State::tag_name:
        if (is_space(c)) {
            seg_ += c;
            state_ = State::before_attribute_name;
        } else if (c == '/') {
            seg_ += c;
            state_ = State::self_closing_start;
        } else if (c == '>') {
            emit_tag(out);
        } else {
            tag_.head += c;
            tag_.name += lower(c);
        }
        return true;

    case State::before_attribute_name:
        if (is_space(c)) {
            seg_ += c;
        } else if (c == '/') {
            seg_ += c;
            state_ = State::self_closing_start;
        } else if (c == '>') {
            emit_tag(out);
        } else {
            begin_attribute(c);
            state_ = State::attribute_name;
        }
        return true;

    case State::attribute_name:
        if (is_space(c)) {
            attr_end_ = seg_.size();
            seg_ += c;
            state_ = State::after_attribute_name;
        } else if (c == '/') {
            finish_attribute_at(seg_.size());
            seg_ += c;
            state_ = State::self_closing_start;
        } else if (c == '=') {
            seg_ += c;
            state_ = State::before_attribute_value;
        } else if (c == '>') {
            finish_attribute_at(seg_.size());
            emit_tag(out);
        } else {
            seg_ += c;
            attr_.name += lower(c);
        }
        return true;

    case State::after_attribute_name:
        if (is_space(c)) {
            seg_ += c;
        } else if (c == '/') {
            finish_attribute_at(attr_end_);
            seg_ += c;
            state_ = State::self_closing_start;
        } else if (c == '=') {
            seg_ += c;
            state_ = State::before_attribute_value;
        } else if (c == '>') {
            finish_attribute_at(attr_end_);
            emit_tag(out);
        } else {
            finish_attribute_at(attr_end_);
            begin_attribute(c);
            state_ = State::attribute_name;
        }
        return true;

    case State::before_attribute_value:
        if (is_space(c)) {
            seg_ += c;
        } else if (c == '"' || c == '\'') {
            seg_ += c;
            attr_.quote = c;
            attr_.value = std::string();
            attr_.value_offset = seg_.size();
            state_ = c == '"' ? State::attribute_value_double : State::attribute_value_single;
        } else if (c == '>') {
            attr_.value = std::string();
            attr_.value_offset = seg_.size();
            finish_attribute_at(seg_.size());
            emit_tag(out);
        } else {
            attr_.value_offset = seg_.size();
            attr_.value = std::string(1, c);
            seg_ += c;
            state_ = State::attribute_value_unquoted;
        }
        return true;

    case State::attribute_value_double:
    case State::attribute_value_single:
        seg_ += c;
        if (c == attr_.quote) {
            finish_attribute_at(seg_.size());
            state_ = State::after_attribute_value_quoted;
        } else {
            *attr_.value += c;
        }
        return true;

    case State::attribute_value_unquoted:
        if (is_space(c)) {
            finish_attribute_at(seg_.size());
            seg_ += c;
            state_ = State::before_attribute_name;
        } else if (c == '>') {
            finish_attribute_at(seg_.size());
            emit_tag(out);
        } else {
            seg_ += c;
            *attr_.value += c;
        }
        return true;

    case State::after_attribute_value_quoted:
        if (is_space(c)) {
            seg_ += c;
            state_ = State::before_attribute_name;
        } else if (c == '/') {
            seg_ += c;
            state_ = State::self_closing_start;
        } else if (c == '>') {
            emit_tag(out);
        } else {
            state_ = State::before_attribute_name;
            return false;
        }
        return true;

    case State::self_closing_start:
        if (c == '>') {
            tag_.self_closing = true;
            emit_tag(out);
            return true;
        }
        state_ = State::before_attribute_name;
        return false;

    case State::raw_text:
        if (c == '<') {
            candidate_ = "<";
            state_ = State::raw_less_than;
        } else {
            raw_ += c;
        }
        return true;

    case State::raw_less_than:
        if (c == '/') {
            candidate_ += c;
            state_ = State::raw_end_tag_open;
            return true;
        }
        raw_ += candidate_;
        candidate_.clear();
        state_ = State::raw_text;
        return false;

    case State::raw_end_tag_open: {
        auto matched = candidate_.size() - 2;
        if (matched < raw_end_name_.size() && lower(c) == raw_end_name_[matched]) {
            candidate_ += c;
            if (matched + 1 == raw_end_name_.size()) {
                state_ = State::raw_end_tag_name;
            }
            return true;
        }
        raw_ += candidate_;
        candidate_.clear();
        state_ = State::raw_text;
        return false;
    }

    case State::raw_end_tag_name:
        if (is_space(c) || c == '/' || c == '>') {
            emit_raw(out);
            begin_tag(true, std::move(candidate_), raw_end_name_);
            candidate_.clear();
            state_ = State::tag_name;
        } else {
            raw_ += candidate_;
            candidate_.clear();
            state_ = State::raw_text;
        }
        return false;
    }
    return true;
}

bool Tokenizer::finish(std::vector<Token>& out) {
    bool unterminated = false;
    switch (state_) {
    case State::data:
        break;
    case State::tag_open:
        append_text("<", out);
        break;
    case State::end_tag_open:
        append_text("</", out);
        break;
    case State::markup_declaration:
    case State::comment:
    case State::doctype:
    case State::bogus_comment:
        append_text(pending_, out);
        break;
    case State::raw_text:
    case State::raw_less_than:
    case State::raw_end_tag_open:
    case State::raw_end_tag_name:
        raw_ += candidate_;
        emit_raw(out);
        break;
    default: {
        // Unterminated tag: everything collected so far is plain text.
        std::string bytes = tag_.head;
        for (const auto& a : tag_.attributes) {
            bytes += a.source;
        }
        bytes += seg_;
        flush_text(out);
        append_text(bytes, out);
        unterminated = true;
        break;
    }
    }
    flush_text(out);
    auto high_water = high_water_;
    *this = Tokenizer{};
    high_water_ = high_water;
    return unterminated;
}

std::size_t Tokenizer::buffered() const {
    std::size_t n = text_.size() + pending_.size() + raw_.size() + candidate_.size() + seg_.size() +
                    tag_.head.size();
    for (const auto& a : tag_.attributes) {
        n += a.source.size();
    }
    return n;
}

void Tokenizer::flush_text(std::vector<Token>& out) {
    if (text_.empty()) {
        return;
    }
    Token t;
    t.kind = TokenKind::text;
    t.data = std::move(text_);
    text_.clear();
    out.push_back(std::move(t));
}

void Tokenizer::append_text(std::string_view bytes, std::vector<Token>& out) {
    while (!bytes.empty()) {
        auto take = std::min(bytes.size(), kMaxTextRun - text_.size());
        text_.append(bytes.substr(0, take));
        bytes.remove_prefix(take);
        if (text_.size() == kMaxTextRun) {
            flush_text(out);
        }
    }
}

void Tokenizer::emit_pending(TokenKind kind, std::vector<Token>& out) {
    Token t;
    t.kind = kind;
    t.data = std::move(pending_);
    pending_.clear();
    out.push_back(std::move(t));
    state_ = State::data;
}

void Tokenizer::begin_tag(bool end_tag, std::string head, std::string name) {
    tag_ = Token{};
    tag_.kind = end_tag ? TokenKind::end_tag : TokenKind::start_tag;
    tag_.head = std::move(head);
    tag_.name = std::move(name);
    seg_.clear();
}

void Tokenizer::begin_attribute(char c) {
    attr_ = Attribute{};
    attr_.name.assign(1, lower(c));
    seg_ += c;
}

void Tokenizer::finish_attribute_at(std::size_t end) {
    attr_.source = seg_.substr(0, end);
    seg_.erase(0, end);
    tag_.attributes.push_back(std::move(attr_));
    attr_ = Attribute{};
}

void Tokenizer::emit_tag(std::vector<Token>& out) {
    tag_.tail = std::move(seg_);
    tag_.tail += '>';
    seg_.clear();
    bool enter_raw = tag_.kind == TokenKind::start_tag && is_raw_text_element(tag_.name);
    if (enter_raw) {
        raw_end_name_ = tag_.name;
    }
    out.push_back(std::move(tag_));
    tag_ = Token{};
    state_ = enter_raw ? State::raw_text : State::data;
}

void Tokenizer::emit_raw(std::vector<Token>& out) {
    if (raw_.empty()) {
        return;
    }
    Token t;
    t.kind = TokenKind::raw_text;
    t.data = std::move(raw_);
    raw_.clear();
    out.push_back(std::move(t));
}

}  // namespace filterplus::html
