#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rationlog/corpus.hpp"
#include "rationlog/label.hpp"

namespace rationlog {

using TemplateId = std::uint32_t;

inline constexpr std::string_view kWildcard = "<*>";

struct MinerParams {
  int tree_depth = 4;
  double similarity_threshold = 0.5;
  int max_children = 100;
};

struct LogTemplate {
  TemplateId template_id = 0;
  std::string template_text;
  Label label = Label::kNormal;
  std::size_t member_count = 0;
  std::string example_content;

  bool operator==(const LogTemplate&) const = default;
};

// Templates are stored in ascending template_id order, ids dense from 0.
struct TemplateIndex {
  std::vector<LogTemplate> templates;
  std::map<SeqIndex, TemplateId> assignment;
  MinerParams params;

  const LogTemplate* find(TemplateId id) const;
  LogTemplate* find(TemplateId id) {
    return const_cast<LogTemplate*>(std::as_const(*this).find(id));
  }
  bool operator==(const TemplateIndex& other) const {
    return templates == other.templates && assignment == other.assignment;
  }
};

// Whitespace split; any token containing a digit becomes "<*>".
std::vector<std::string> mask_tokens(std::string_view content);

// Fixed-depth prefix-tree clustering: records are bucketed by token count,
// routed down (tree_depth - 2) levels keyed by their leading tokens, and
// merged into the most similar leaf cluster when the fraction of positions
// with equal non-wildcard tokens reaches similarity_threshold. A final pass
// assigns every record to the lowest-id template that matches it exactly,
// so match_template on a member's own content returns its assignment.
// Template labels start as the disjunction of member labels.
TemplateIndex mine_templates(const Corpus& corpus, const MinerParams& params = {});

// Similarity used for routing unseen content: positions where the template
// token equals the content token or is a wildcard, over the longer length.
double match_similarity(const std::vector<std::string>& template_tokens,
                        const std::vector<std::string>& content_tokens);

// Best template by match_similarity, lowest id on ties; nullopt when the
// best similarity is below the index threshold.
std::optional<TemplateId> match_template(const TemplateIndex& index, std::string_view content);

// JSONL with keys id, template, label, count, example.
void write_templates_jsonl(const std::filesystem::path& path, const TemplateIndex& index);
// JSONL with keys seq, template_id.
void write_assignments_jsonl(const std::filesystem::path& path, const TemplateIndex& index);
// Rebuilds an index from the two files above; assignments are optional.
TemplateIndex read_template_index(const std::filesystem::path& templates_path,
                                  const std::filesystem::path& assignments_path = {},
                                  const MinerParams& params = {});

}  // namespace rationlog
