#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace focus {

/// User-controlled instruction sent to the proposer: the task itself plus
/// formatting instructions that make the reply machine readable.
struct TaskPrompt {
    std::string task_text;
    std::string addendum;

    friend bool operator==(const TaskPrompt&, const TaskPrompt&) = default;
};

/// The prompt pair shipped with the tool (also in assets/default_prompt.txt).
[[nodiscard]] TaskPrompt default_prompt();

/// Prompt file format: task text, then a line holding only "---", then the
/// addendum. Without a separator line the whole file is the task.
[[nodiscard]] TaskPrompt parse_prompt_file(std::string_view text);

/// task_text + "\n" + addendum, or task_text alone when the addendum is
/// blank. Both parts are trimmed. Throws EmptyPromptError on a blank task.
[[nodiscard]] std::string build_prompt(const TaskPrompt& prompt);

/// Verbatim proposer output; never rewritten by parsing.
struct RawProposal {
    std::string text;
    std::string source;
};

enum class LabelNormalization {
    Exact,        ///< no morphological folding
    FoldPlurals,  ///< naive English plural folding on the last word
};

[[nodiscard]] std::string_view to_string(LabelNormalization level);
[[nodiscard]] LabelNormalization parse_label_normalization(std::string_view text);

/// Lower-cases, strips list markers and surrounding punctuation, collapses
/// inner whitespace. Throws EmptyLabelError if nothing is left.
[[nodiscard]] std::string normalize_label(std::string_view text,
                                          LabelNormalization level = LabelNormalization::Exact);
[[nodiscard]] std::optional<std::string> try_normalize_label(
    std::string_view text, LabelNormalization level = LabelNormalization::Exact);

/// Ordered, duplicate-free, non-empty list of normalized labels.
class ProposalList {
public:
    /// Normalizes every entry, drops blanks and duplicates (first occurrence
    /// wins). Throws EmptyProposalError if no label survives.
    static ProposalList from_labels(std::span<const std::string> labels,
                                    LabelNormalization level = LabelNormalization::Exact);
    static ProposalList from_labels(std::initializer_list<std::string> labels,
                                    LabelNormalization level = LabelNormalization::Exact);

    [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }
    [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
    [[nodiscard]] bool contains(std::string_view label) const;

    /// Labels joined with ", ".
    [[nodiscard]] std::string joined() const;

    friend bool operator==(const ProposalList&, const ProposalList&) = default;

private:
    friend ProposalList parse_proposal(const RawProposal& raw, LabelNormalization level);

    explicit ProposalList(std::vector<std::string> labels) : labels_(std::move(labels)) {}

    std::vector<std::string> labels_;
};

/// Splits on newlines, commas, periods and semicolons, strips per-line list
/// markers, normalizes and deduplicates. Throws EmptyProposalError when no
/// label survives.
[[nodiscard]] ProposalList parse_proposal(const RawProposal& raw,
                                          LabelNormalization level = LabelNormalization::Exact);

}  // namespace focus
