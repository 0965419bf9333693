#include "focus/proposal.hpp"

#include "focus/errors.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace focus {

namespace {

constexpr std::string_view kEnDash = "\xE2\x80\x93";
constexpr std::string_view kBullet = "\xE2\x80\xA2";

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

bool is_digit(char c) {
    return c >= '0' && c <= '9';
}

bool is_edge_punct(char c) {
    switch (c) {
        case '.': case ',': case ';': case ':': case '!': case '-': case '"': case '\'':
            return true;
        default:
            return false;
    }
}

std::string_view trim_space(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

// "12." / "3)" followed by end or a non-digit, "-", "*" or a bullet.
std::string_view strip_one_marker(std::string_view s) {
    std::size_t digits = 0;
    while (digits < s.size() && is_digit(s[digits])) ++digits;
    if (digits > 0 && digits < s.size() && (s[digits] == '.' || s[digits] == ')')) {
        if (digits + 1 == s.size() || !is_digit(s[digits + 1])) {
            return s.substr(digits + 1);
        }
    }
    if (!s.empty() && (s.front() == '-' || s.front() == '*')) {
        return s.substr(1);
    }
    if (s.starts_with(kBullet)) {
        return s.substr(kBullet.size());
    }
    return s;
}

std::string_view strip_markers(std::string_view s) {
    while (true) {
        const auto before = s;
        s = strip_one_marker(trim_space(s));
        if (s == before) {
            return s;
        }
    }
}

// One edge token per step (marker first, then leading, then trailing
// punctuation) so "1." left over after stripping reads as a marker.
std::string_view strip_edges(std::string_view s) {
    while (true) {
        s = trim_space(s);
        if (const auto m = strip_one_marker(s); m != s) {
            s = m;
        } else if (!s.empty() && is_edge_punct(s.front())) {
            s.remove_prefix(1);
        } else if (s.starts_with(kEnDash)) {
            s.remove_prefix(kEnDash.size());
        } else if (!s.empty() && is_edge_punct(s.back())) {
            s.remove_suffix(1);
        } else if (s.ends_with(kEnDash)) {
            s.remove_suffix(kEnDash.size());
        } else {
            return s;
        }
    }
}

bool fold_once(std::string& word) {
    const auto n = word.size();
    auto ends = [&](std::string_view suffix) { return std::string_view(word).ends_with(suffix); };
    if (n > 4 && ends("ies")) {
        word.replace(n - 3, 3, "y");
        return true;
    }
    if (n > 4 && (ends("ses") || ends("xes") || ends("zes") || ends("ches") || ends("shes"))) {
        word.resize(n - 2);
        return true;
    }
    if (n > 3 && ends("s") && !ends("ss") && !ends("us") && !ends("is")) {
        word.resize(n - 1);
        return true;
    }
    return false;
}

void fold_plural(std::string& label) {
    const auto space = label.rfind(' ');
    const auto start = space == std::string::npos ? 0 : space + 1;
    std::string word = label.substr(start);
    while (fold_once(word)) {
    }
    label.replace(start, std::string::npos, word);
}

std::optional<std::string> normalize_exact(std::string_view text) {
    const auto core = strip_edges(text);
    std::string out;
    out.reserve(core.size());
    bool pending_space = false;
    for (char c : core) {
        if (is_space(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) {
            out.push_back(' ');
        }
        pending_space = false;
        out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    }
    if (out.empty()) {
        return std::nullopt;
    }
    return out;
}

void push_unique(std::vector<std::string>& out, std::unordered_set<std::string>& seen,
                 std::string label) {
    if (seen.insert(label).second) {
        out.push_back(std::move(label));
    }
}

}  // namespace

TaskPrompt default_prompt() {
    return {
        "Identify and list every distinct physical object that is part of, worn by, or held by "
        "the subject in the image.",
        "Answer with one line of comma-separated object names in lowercase. Do not number the "
        "items and do not add any other text.",
    };
}

TaskPrompt parse_prompt_file(std::string_view text) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        if (trim_space(text.substr(pos, end - pos)) == "---") {
            return {std::string(trim_space(text.substr(0, pos))),
                    std::string(trim_space(text.substr(std::min(end + 1, text.size()))))};
        }
        pos = end + 1;
    }
    return {std::string(trim_space(text)), ""};
}

std::string build_prompt(const TaskPrompt& prompt) {
    const auto task = trim_space(prompt.task_text);
    if (task.empty()) {
        throw EmptyPromptError("task prompt is empty");
    }
    const auto addendum = trim_space(prompt.addendum);
    if (addendum.empty()) {
        return std::string(task);
    }
    std::string out(task);
    out += '\n';
    out += addendum;
    return out;
}

std::string_view to_string(LabelNormalization level) {
    return level == LabelNormalization::Exact ? "exact" : "fold_plurals";
}

LabelNormalization parse_label_normalization(std::string_view text) {
    if (text == "exact") return LabelNormalization::Exact;
    if (text == "fold_plurals") return LabelNormalization::FoldPlurals;
    throw std::invalid_argument("unknown label normalization '" + std::string(text) +
                                "' (expected exact or fold_plurals)");
}

std::optional<std::string> try_normalize_label(std::string_view text, LabelNormalization level) {
    auto out = normalize_exact(text);
    if (!out || level == LabelNormalization::Exact) {
        return out;
    }
    // Folding can expose new edge punctuation ("ab-s"), so iterate to a fixed point.
    while (true) {
        std::string folded = *out;
        fold_plural(folded);
        auto again = normalize_exact(folded);
        if (!again || *again == *out) {
            return out;
        }
        out = std::move(again);
    }
}

std::string normalize_label(std::string_view text, LabelNormalization level) {
    auto label = try_normalize_label(text, level);
    if (!label) {
        throw EmptyLabelError("label '" + std::string(text) + "' is empty after normalization");
    }
    return *std::move(label);
}

ProposalList ProposalList::from_labels(std::span<const std::string> labels,
                                       LabelNormalization level) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& raw : labels) {
        if (auto label = try_normalize_label(raw, level)) {
            push_unique(out, seen, *std::move(label));
        }
    }
    if (out.empty()) {
        throw EmptyProposalError("proposal list is empty");
    }
    return ProposalList(std::move(out));
}

ProposalList ProposalList::from_labels(std::initializer_list<std::string> labels,
                                       LabelNormalization level) {
    return from_labels(std::span(labels.begin(), labels.size()), level);
}

bool ProposalList::contains(std::string_view label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::string ProposalList::joined() const {
    std::string out;
    for (const auto& label : labels_) {
        if (!out.empty()) out += ", ";
        out += label;
    }
    return out;
}

ProposalList parse_proposal(const RawProposal& raw, LabelNormalization level) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    std::string_view text = raw.text;
    std::size_t line_start = 0;
    while (line_start <= text.size()) {
        const auto line_end = std::min(text.find('\n', line_start), text.size());
        auto line = strip_markers(text.substr(line_start, line_end - line_start));
        std::size_t frag_start = 0;
        while (frag_start <= line.size()) {
            const auto frag_end = std::min(line.find_first_of(",.;", frag_start), line.size());
            if (auto label = try_normalize_label(line.substr(frag_start, frag_end - frag_start), level)) {
                push_unique(out, seen, *std::move(label));
            }
            frag_start = frag_end + 1;
        }
        line_start = line_end + 1;
    }
    if (out.empty()) {
        throw EmptyProposalError("no labels could be parsed from " +
                                 (raw.source.empty() ? std::string("proposal") : raw.source) +
                                 " output");
    }
    return ProposalList(std::move(out));
}

}  // namespace focus
