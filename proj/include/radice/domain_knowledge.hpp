#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace radice {

enum class Sign { Positive, Negative };

/// Expert-supplied instantaneous edges plus a level function. A metric may be
/// caused only by metrics of the same or a lower level.
struct PartialGraphKnowledge {
    std::vector<std::pair<std::string, std::string>> domain_edges;
    std::map<std::string, int> levels;
    int default_level = 0;

    int level_of(const std::string& metric) const;
};

/// Required correlation sign with the performance metric, per candidate.
struct RefinementKnowledge {
    std::map<std::string, Sign> sign_rules;
};

struct DomainKnowledgeModel {
    PartialGraphKnowledge partial;
    RefinementKnowledge refinement;

    bool empty() const {
        return partial.domain_edges.empty() && partial.levels.empty() && refinement.sign_rules.empty();
    }
};

int level_of(const DomainKnowledgeModel& model, const std::string& metric);

/// True when no rule exists for the metric, otherwise iff sign(corr) matches
/// the rule (corr == 0 never matches).
bool sign_permits(const DomainKnowledgeModel& model, const std::string& metric, double corr);

/// Throws InvalidArgument if the domain edges are cyclic or contradict the
/// levels, or (when `universe` is given) reference unknown metrics.
void validate(const DomainKnowledgeModel& model, const std::optional<std::set<std::string>>& universe = std::nullopt);

/// `{"levels": {metric: int}, "edges": [[from, to]], "rules": {metric: "positive"|"negative"}}`
DomainKnowledgeModel dk_from_json(const nlohmann::json& j);
nlohmann::json dk_to_json(const DomainKnowledgeModel& model);

/// Parses and validates; malformed JSON raises ParseError.
DomainKnowledgeModel load_dk(const std::filesystem::path& path);
void save_dk(const DomainKnowledgeModel& model, const std::filesystem::path& path);

}  // namespace radice
