#include <lexgraph/text.hpp>

#include <algorithm>
#include <array>
#include <cctype>

namespace lexgraph {

namespace {

bool isWordByte(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

bool endsWith(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Tokens that designate rather than identify a provision.
constexpr std::array<std::string_view, 11> kDesignators = {
    "ART", "ARTICLE", "ARTIKEL", "SEC", "SECT", "SECTION",
    "PARA", "PARAGRAPH", "NO", "NR", "NUM",
};

bool isDesignator(std::string_view segment) {
    return std::find(kDesignators.begin(), kDesignators.end(), segment) != kDesignators.end();
}

} // namespace

std::string asciiLower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (isWordByte(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

std::unordered_map<std::string, int> termFrequencies(const std::vector<std::string>& tokens) {
    std::unordered_map<std::string, int> freq;
    for (const auto& t : tokens) {
        ++freq[t];
    }
    return freq;
}

std::string stem(std::string_view token) {
    std::string s = asciiLower(token);

    // plural
    if (endsWith(s, "sses")) {
        s.resize(s.size() - 2);
    } else if (endsWith(s, "ies")) {
        s.resize(s.size() - 3);
        s.push_back('y');
    } else if (s.size() > 3 && s.back() == 's' && !endsWith(s, "ss")) {
        s.pop_back();
    }

    // verbal
    if (endsWith(s, "ing") && s.size() >= 6) {
        s.resize(s.size() - 3);
    } else if (endsWith(s, "ed") && s.size() >= 5) {
        s.resize(s.size() - 2);
    }

    // derivational; the 8-char floor keeps words like "witness" whole
    if (endsWith(s, "ness") && s.size() >= 8) {
        s.resize(s.size() - 4);
    } else if (endsWith(s, "ment") && s.size() >= 8) {
        s.resize(s.size() - 4);
    } else if (endsWith(s, "ly") && s.size() >= 5) {
        s.resize(s.size() - 2);
    }

    // final e, so "damaged"/"damages"/"damage" agree
    if (s.size() >= 4 && s.back() == 'e') {
        s.pop_back();
    }
    return s;
}

std::string normalizeCode(std::string_view raw) {
    // Segment into uppercased alphanumeric runs.
    std::vector<std::string> segments;
    std::string current;
    for (unsigned char c : raw) {
        if (isWordByte(c)) {
            current.push_back(static_cast<char>(std::toupper(c)));
        } else if (!current.empty()) {
            segments.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        segments.push_back(std::move(current));
    }

    std::string out;
    auto append = [&out](const std::string& seg) {
        if (!out.empty()) {
            out.push_back('-');
        }
        out += seg;
    };
    auto letterLed = [](const std::string& seg) {
        unsigned char front = seg.front();
        return std::isalpha(front) != 0 || front >= 0x80;
    };
    // Letter-led segments first, numeric segments after, order otherwise kept.
    for (const auto& seg : segments) {
        if (letterLed(seg) && !isDesignator(seg)) {
            append(seg);
        }
    }
    for (const auto& seg : segments) {
        if (!letterLed(seg)) {
            append(seg);
        }
    }
    return out;
}

} // namespace lexgraph
