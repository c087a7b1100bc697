#include <algorithm>
#include <array>
#include <string>
#include <string_view>
#include <vector>

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "temporafed/corpus.hpp"

namespace temporafed {

namespace {

// Emoticons are matched after lowercasing.
constexpr std::array<std::string_view, 52> kEmoticons = {
    ":)",  ":-)", ":(",  ":-(", ":d",  ":-d", ";)",  ";-)", ":p",  ":-p", ";p",  ";-p", ":o",
    ":-o", ":/",  ":-/", ":\\", ":'(", ":')", ":*",  ":-*", "<3",  "</3", "xd",  "x-d", "=)",
    "=(",  "=d",  "8)",  "8-)", ":|",  ":-|", "^_^", "^^",  "-_-", "o_o", "t_t", ":]",  ":[",
    ":-]", ":-[", ":3",  ">:(", "d:",  "):",  "(:",  ":$",  ";d",  ":@",  ">_<", "o.o", ":s",
};

constexpr std::string_view kEmoticonChars = ":;=8'-^_()[]{}<>/\\|*3dpoxcs$@!";
constexpr std::string_view kEmoticonEyes = ":;=";
constexpr std::string_view kEmoticonMouths = "()[]{}<>/\\|*3dpocs$";

constexpr std::string_view kLeadingPunct = "\"'([{<*";
constexpr std::string_view kTrailingPunct = "\"')]}>.,!?;:*";

bool is_ascii(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

std::string normalize(std::string_view text) {
    if (is_ascii(text)) {
        std::string out(text);
        std::transform(out.begin(), out.end(), out.begin(), [](char c) {
            return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
        });
        return out;
    }
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    icu::UnicodeString source = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    icu::UnicodeString lowered = source.toLower(icu::Locale::getRoot());
    icu::UnicodeString normalized = U_SUCCESS(status) ? nfc->normalize(lowered, status) : lowered;
    if (U_FAILURE(status)) normalized = lowered;
    std::string out;
    normalized.toUTF8String(out);
    return out;
}

bool contains_any(std::string_view s, std::string_view chars) {
    return s.find_first_of(chars) != std::string_view::npos;
}

bool is_emoticon(std::string_view chunk) {
    if (std::find(kEmoticons.begin(), kEmoticons.end(), chunk) != kEmoticons.end()) return true;
    if (chunk.size() < 2 || chunk.size() > 6) return false;
    if (chunk.find_first_not_of(kEmoticonChars) != std::string_view::npos) return false;
    return contains_any(chunk, kEmoticonEyes) && contains_any(chunk, kEmoticonMouths);
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string_view strip(std::string_view s) {
    while (!s.empty() && kLeadingPunct.find(s.front()) != std::string_view::npos) s.remove_prefix(1);
    while (!s.empty() && kTrailingPunct.find(s.back()) != std::string_view::npos) s.remove_suffix(1);
    return s;
}

bool is_url(std::string_view s) {
    if (s.find("://") != std::string_view::npos) return true;
    if (s.starts_with("www.")) return true;
    // bare host followed by a path, e.g. t.co/abc
    auto slash = s.find('/');
    if (slash == std::string_view::npos || slash == 0) return false;
    auto host = s.substr(0, slash);
    if (host.find('.') == std::string_view::npos || host.front() == '.' || host.back() == '.') return false;
    return std::all_of(host.begin(), host.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || is_digit(c) || c == '.' || c == '-';
    });
}

bool is_email(std::string_view s) {
    auto at = s.find('@');
    if (at == std::string_view::npos || at == 0) return false;
    auto dot = s.find('.', at + 1);
    return dot != std::string_view::npos && dot > at + 1 && dot + 1 < s.size();
}

bool is_time(std::string_view s) {
    for (std::string_view suffix : {"a.m.", "p.m.", "am", "pm"}) {
        if (s.size() > suffix.size() && s.ends_with(suffix)) {
            s.remove_suffix(suffix.size());
            break;
        }
    }
    std::size_t i = 0;
    auto digits = [&](std::size_t lo, std::size_t hi) {
        std::size_t start = i;
        while (i < s.size() && is_digit(s[i])) ++i;
        return i - start >= lo && i - start <= hi;
    };
    if (!digits(1, 2)) return false;
    if (i == s.size()) return false;  // plain number, not a time
    int groups = 0;
    while (i < s.size() && s[i] == ':') {
        ++i;
        if (!digits(2, 2)) return false;
        ++groups;
    }
    return i == s.size() && groups >= 1 && groups <= 2;
}

bool is_hour_marker(std::string_view s) {
    // "5pm", "11am"
    for (std::string_view suffix : {"am", "pm"}) {
        if (s.size() > suffix.size() && s.size() <= suffix.size() + 2 && s.ends_with(suffix)) {
            auto head = s.substr(0, s.size() - suffix.size());
            if (std::all_of(head.begin(), head.end(), is_digit)) return true;
        }
    }
    return false;
}

bool is_word_char(UChar32 c) {
    if (c == '\'' || c == 0x2019) return true;  // apostrophes, trimmed at word ends
    switch (u_charType(c)) {
        case U_UPPERCASE_LETTER:
        case U_LOWERCASE_LETTER:
        case U_TITLECASE_LETTER:
        case U_MODIFIER_LETTER:
        case U_OTHER_LETTER:
        case U_NON_SPACING_MARK:
        case U_ENCLOSING_MARK:
        case U_COMBINING_SPACING_MARK:
        case U_DECIMAL_DIGIT_NUMBER:
        case U_LETTER_NUMBER:
        case U_OTHER_NUMBER:
            return true;
        default:
            return false;
    }
}

std::string_view trim_apostrophes(std::string_view s) {
    auto is_apos_at_front = [&] {
        return s.starts_with("'") || s.starts_with("\xE2\x80\x99");
    };
    auto is_apos_at_back = [&] {
        return s.ends_with("'") || s.ends_with("\xE2\x80\x99");
    };
    while (!s.empty() && is_apos_at_front()) s.remove_prefix(s.front() == '\'' ? 1 : 3);
    while (!s.empty() && is_apos_at_back()) s.remove_suffix(s.back() == '\'' ? 1 : 3);
    return s;
}

bool is_bare_number(std::string_view s) {
    const auto* p = reinterpret_cast<const uint8_t*>(s.data());
    int32_t i = 0;
    const auto n = static_cast<int32_t>(s.size());
    while (i < n) {
        UChar32 c;
        U8_NEXT(p, i, n, c);
        if (c < 0 || !u_isdigit(c)) return false;
    }
    return n > 0;
}

void emit_words(std::string_view s, std::vector<std::string>& out) {
    const auto* p = reinterpret_cast<const uint8_t*>(s.data());
    const auto n = static_cast<int32_t>(s.size());
    int32_t i = 0;
    int32_t start = -1;
    auto flush = [&](int32_t end) {
        if (start < 0) return;
        auto word = trim_apostrophes(s.substr(static_cast<std::size_t>(start), static_cast<std::size_t>(end - start)));
        if (!word.empty() && !is_bare_number(word)) out.emplace_back(word);
        start = -1;
    };
    while (i < n) {
        int32_t here = i;
        UChar32 c;
        U8_NEXT(p, i, n, c);
        if (c >= 0 && is_word_char(c)) {
            if (start < 0) start = here;
        } else {
            flush(here);
        }
    }
    flush(n);
}

template <typename F>
void for_each_chunk(std::string_view text, F&& f) {
    const auto* p = reinterpret_cast<const uint8_t*>(text.data());
    const auto n = static_cast<int32_t>(text.size());
    int32_t i = 0;
    int32_t start = -1;
    while (i < n) {
        int32_t here = i;
        UChar32 c;
        U8_NEXT(p, i, n, c);
        bool space = c >= 0 && (u_isUWhiteSpace(c) || c == 0x200B);
        if (space) {
            if (start >= 0) f(text.substr(static_cast<std::size_t>(start), static_cast<std::size_t>(here - start)));
            start = -1;
        } else if (start < 0) {
            start = here;
        }
    }
    if (start >= 0) f(text.substr(static_cast<std::size_t>(start)));
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    const std::string normalized = normalize(text);
    for_each_chunk(normalized, [&](std::string_view chunk) {
        if (is_emoticon(chunk)) return;
        std::string_view core = strip(chunk);
        if (core.empty() || is_emoticon(core)) return;
        if (core.front() == '@' || is_url(core) || is_email(core)) return;
        if (is_time(core) || is_hour_marker(core)) return;
        while (!core.empty() && core.front() == '#') core.remove_prefix(1);
        emit_words(core, tokens);
    });
    return tokens;
}

SurfaceCounts count_surface_features(std::string_view text) {
    SurfaceCounts counts;
    const std::string normalized = normalize(text);
    for_each_chunk(normalized, [&](std::string_view chunk) {
        std::string_view core = strip(chunk);
        if (core.size() < 2) return;
        if (is_url(core)) {
            ++counts.urls;
        } else if (core.front() == '#') {
            ++counts.hashtags;
        } else if (core.front() == '@') {
            ++counts.mentions;
        }
    });
    return counts;
}

}  // namespace temporafed
