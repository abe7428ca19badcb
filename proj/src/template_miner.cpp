#include "rationlog/template_miner.hpp"

#include <algorithm>
#include <cctype>
#include <memory>

#include "rationlog/error.hpp"
#include "rationlog/text.hpp"

namespace rationlog {
namespace {

bool has_digit(std::string_view token) {
  return std::any_of(token.begin(), token.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

struct Cluster {
  std::vector<std::string> tokens;
};

struct Node {
  std::map<std::string, std::unique_ptr<Node>> children;
  std::vector<std::size_t> clusters;
};

// Drain-style sequence similarity: wildcard positions in the template do not
// count as matches.
std::pair<double, std::size_t> seq_similarity(const std::vector<std::string>& tmpl,
                                              const std::vector<std::string>& tokens) {
  std::size_t same = 0, params = 0;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == kWildcard) {
      ++params;
    } else if (tmpl[i] == tokens[i]) {
      ++same;
    }
  }
  return {static_cast<double>(same) / static_cast<double>(tmpl.size()), params};
}

class PrefixTree {
 public:
  explicit PrefixTree(const MinerParams& params) : params_(params) {}

  std::size_t add(const std::vector<std::string>& tokens) {
    Node& leaf = descend(tokens);
    std::optional<std::size_t> best;
    double best_sim = -1.0;
    std::size_t best_params = 0;
    for (std::size_t idx : leaf.clusters) {
      auto [sim, n_params] = seq_similarity(clusters_[idx].tokens, tokens);
      if (sim > best_sim || (sim == best_sim && n_params > best_params)) {
        best = idx;
        best_sim = sim;
        best_params = n_params;
      }
    }
    if (best && best_sim >= params_.similarity_threshold) {
      auto& tmpl = clusters_[*best].tokens;
      for (std::size_t i = 0; i < tmpl.size(); ++i)
        if (tmpl[i] != tokens[i]) tmpl[i] = std::string(kWildcard);
      return *best;
    }
    clusters_.push_back(Cluster{tokens});
    leaf.clusters.push_back(clusters_.size() - 1);
    return clusters_.size() - 1;
  }

  const std::vector<Cluster>& clusters() const { return clusters_; }

 private:
  Node& descend(const std::vector<std::string>& tokens) {
    auto& length_node = by_length_[tokens.size()];
    if (!length_node) length_node = std::make_unique<Node>();
    Node* node = length_node.get();
    const std::size_t layers =
        std::min<std::size_t>(tokens.size(), static_cast<std::size_t>(std::max(0, params_.tree_depth - 2)));
    for (std::size_t layer = 0; layer < layers; ++layer) {
      std::string key = tokens[layer];
      if (!node->children.count(key) &&
          node->children.size() >= static_cast<std::size_t>(params_.max_children))
        key = std::string(kWildcard);
      auto& child = node->children[key];
      if (!child) child = std::make_unique<Node>();
      node = child.get();
    }
    return *node;
  }

  MinerParams params_;
  std::map<std::size_t, std::unique_ptr<Node>> by_length_;
  std::vector<Cluster> clusters_;
};

bool matches_exactly(const std::vector<std::string>& tmpl, const std::vector<std::string>& tokens) {
  if (tmpl.size() != tokens.size()) return false;
  for (std::size_t i = 0; i < tmpl.size(); ++i)
    if (tmpl[i] != kWildcard && tmpl[i] != tokens[i]) return false;
  return true;
}

void validate(const MinerParams& p) {
  require(p.tree_depth >= 2, "tree_depth must be >= 2");
  require(p.similarity_threshold > 0.0 && p.similarity_threshold < 1.0,
          "similarity_threshold must lie in (0,1)");
  require(p.max_children >= 1, "max_children must be >= 1");
}

}  // namespace

const LogTemplate* TemplateIndex::find(TemplateId id) const {
  if (id < templates.size() && templates[id].template_id == id) return &templates[id];
  auto it = std::lower_bound(templates.begin(), templates.end(), id,
                             [](const LogTemplate& t, TemplateId v) { return t.template_id < v; });
  return it != templates.end() && it->template_id == id ? &*it : nullptr;
}

std::vector<std::string> mask_tokens(std::string_view content) {
  auto tokens = split_whitespace(content);
  for (auto& t : tokens)
    if (has_digit(t)) t = std::string(kWildcard);
  return tokens;
}

TemplateIndex mine_templates(const Corpus& corpus, const MinerParams& params) {
  validate(params);
  require(!corpus.records.empty(), "mine_templates needs a non-empty corpus");

  std::vector<std::vector<std::string>> masked;
  masked.reserve(corpus.records.size());
  PrefixTree tree(params);
  for (const auto& rec : corpus.records) {
    masked.push_back(mask_tokens(rec.content));
    require(!masked.back().empty(), "record content is empty");
    tree.add(masked.back());
  }

  // Reassign every record to the exactly matching cluster with the lowest
  // template id. Ids are issued in first-use order, so an id already handed
  // out is always lower than any issued later; a record's own cluster always
  // qualifies.
  const auto& clusters = tree.clusters();
  std::map<std::size_t, std::vector<std::size_t>> by_length;
  for (std::size_t c = 0; c < clusters.size(); ++c) by_length[clusters[c].tokens.size()].push_back(c);

  std::vector<std::optional<TemplateId>> id_of(clusters.size());
  TemplateIndex index;
  index.params = params;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const auto& rec = corpus.records[i];
    std::optional<std::size_t> chosen;
    for (std::size_t c : by_length[masked[i].size()]) {
      if (!matches_exactly(clusters[c].tokens, masked[i])) continue;
      if (!chosen || (id_of[c] && (!id_of[*chosen] || *id_of[c] < *id_of[*chosen]))) chosen = c;
    }
    auto& id = id_of[*chosen];
    if (!id) {
      id = static_cast<TemplateId>(index.templates.size());
      LogTemplate t;
      t.template_id = *id;
      t.template_text = join(clusters[*chosen].tokens);
      t.example_content = rec.content;
      index.templates.push_back(std::move(t));
    }
    auto& t = index.templates[*id];
    ++t.member_count;
    if (is_anomalous(rec.label)) t.label = Label::kAnomalous;
    index.assignment[rec.seq_index] = *id;
  }
  return index;
}

double match_similarity(const std::vector<std::string>& tmpl,
                        const std::vector<std::string>& tokens) {
  const std::size_t longest = std::max(tmpl.size(), tokens.size());
  if (longest == 0) return 0.0;
  std::size_t same = 0;
  const std::size_t shared = std::min(tmpl.size(), tokens.size());
  for (std::size_t i = 0; i < shared; ++i)
    if (tmpl[i] == kWildcard || tmpl[i] == tokens[i]) ++same;
  return static_cast<double>(same) / static_cast<double>(longest);
}

std::optional<TemplateId> match_template(const TemplateIndex& index, std::string_view content) {
  require(!index.templates.empty(), "match_template needs a non-empty index");
  const auto tokens = mask_tokens(content);
  std::optional<TemplateId> best;
  double best_sim = -1.0;
  for (const auto& t : index.templates) {
    const double sim = match_similarity(split_whitespace(t.template_text), tokens);
    if (sim > best_sim) {
      best_sim = sim;
      best = t.template_id;
    }
  }
  if (best_sim < index.params.similarity_threshold) return std::nullopt;
  return best;
}

void write_templates_jsonl(const std::filesystem::path& path, const TemplateIndex& index) {
  std::vector<Json> rows;
  rows.reserve(index.templates.size());
  for (const auto& t : index.templates)
    rows.push_back(Json{{"id", t.template_id},
                        {"template", t.template_text},
                        {"label", to_string(t.label)},
                        {"count", t.member_count},
                        {"example", t.example_content}});
  write_jsonl(path, rows);
}

void write_assignments_jsonl(const std::filesystem::path& path, const TemplateIndex& index) {
  std::vector<Json> rows;
  rows.reserve(index.assignment.size());
  for (const auto& [seq, id] : index.assignment) rows.push_back(Json{{"seq", seq}, {"template_id", id}});
  write_jsonl(path, rows);
}

TemplateIndex read_template_index(const std::filesystem::path& templates_path,
                                  const std::filesystem::path& assignments_path,
                                  const MinerParams& params) {
  TemplateIndex index;
  index.params = params;
  for_each_jsonl(templates_path, [&](const Json& row) {
    LogTemplate t;
    const long long id = json_int(row, "id");
    if (id < 0) throw Error(ErrorKind::kSchema, "negative template id");
    t.template_id = static_cast<TemplateId>(id);
    t.template_text = json_string(row, "template");
    t.label = label_from_string(json_string(row, "label"));
    t.member_count = static_cast<std::size_t>(json_int(row, "count"));
    t.example_content = json_string(row, "example");
    index.templates.push_back(std::move(t));
  });
  std::sort(index.templates.begin(), index.templates.end(),
            [](const LogTemplate& a, const LogTemplate& b) { return a.template_id < b.template_id; });
  for (std::size_t i = 1; i < index.templates.size(); ++i)
    if (index.templates[i].template_id == index.templates[i - 1].template_id)
      throw Error(ErrorKind::kSchema, "duplicate template id " +
                                          std::to_string(index.templates[i].template_id));
  if (!assignments_path.empty()) {
    for_each_jsonl(assignments_path, [&](const Json& row) {
      const auto id = static_cast<TemplateId>(json_int(row, "template_id"));
      if (!index.find(id))
        throw Error(ErrorKind::kUnknownTemplate, "assignment to unknown template " + std::to_string(id));
      index.assignment[static_cast<SeqIndex>(json_int(row, "seq"))] = id;
    });
  }
  return index;
}

}  // namespace rationlog
