#include "retokenize.hpp"

#include "filterplus/html/tokenizer.hpp"

namespace oracle {

using filterplus::html::Token;
using filterplus::html::Tokenizer;

std::vector<Token> tokenize_whole(std::string_view doc) {
    Tokenizer t;
    std::vector<Token> out;
    t.feed(doc, out);
    t.finish(out);
    return out;
}

std::vector<Token> tokenize_split(std::string_view doc, const std::vector<std::size_t>& cuts) {
    Tokenizer t;
    std::vector<Token> out;
    std::size_t at = 0;
    for (auto cut : cuts) {
        t.feed(doc.substr(at, cut - at), out);
        at = cut;
    }
    t.feed(doc.substr(at), out);
    t.finish(out);
    return out;
}

std::string reassemble(const std::vector<Token>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        t.append_source(out);
    }
    return out;
}

long first_difference(const std::vector<Token>& a, const std::vector<Token>& b) {
    auto n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (!(a[i] == b[i])) {
            return static_cast<long>(i);
        }
    }
    return a.size() == b.size() ? -1 : static_cast<long>(n);
}

}  // namespace oracle
