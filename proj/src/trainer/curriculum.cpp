#include "agentsim/trainer/curriculum.hpp"

#include "agentsim/core/error.hpp"
#include "agentsim/protocol/server.hpp"

namespace agentsim::trainer {

LessonPlan lesson_plan_from_json(const nlohmann::json& j) {
  LessonPlan plan;
  const auto& lessons = j.is_object() ? j.at("lessons") : j;
  if (!lessons.is_array()) throw Error(ErrorCode::kInvalidConfig, "curriculum lessons must be a list");
  for (const auto& l : lessons) {
    Lesson lesson;
    for (const auto& [k, v] : l.at("params").items()) lesson.params[k] = v.get<double>();
    if (l.contains("completion")) {
      const auto& c = l.at("completion");
      const std::string measure = c.value("measure", "mean_reward");
      if (measure == "mean_reward") {
        lesson.measure = Measure::kMeanReward;
      } else if (measure == "progress") {
        lesson.measure = Measure::kProgress;
      } else {
        throw Error(ErrorCode::kInvalidConfig, "unknown curriculum measure '" + measure + "'");
      }
      lesson.threshold = c.value("threshold", 0.0);
      lesson.min_lesson_length = c.value("min_lesson_length", 0);
    }
    plan.lessons.push_back(std::move(lesson));
  }
  return plan;
}

nlohmann::json to_json(const LessonPlan& plan) {
  nlohmann::json lessons = nlohmann::json::array();
  for (const auto& l : plan.lessons) {
    lessons.push_back({{"params", l.params},
                       {"completion",
                        {{"measure", l.measure == Measure::kMeanReward ? "mean_reward" : "progress"},
                         {"threshold", l.threshold},
                         {"min_lesson_length", l.min_lesson_length}}}});
  }
  return {{"lessons", lessons}};
}

Curriculum::Curriculum(LessonPlan plan) : plan_(std::move(plan)) {
  if (plan_.lessons.empty()) throw Error(ErrorCode::kInvalidConfig, "lesson plan has no lessons");
}

bool Curriculum::advance(double measure_value, int episodes_in_lesson) {
  if (final_lesson()) return false;
  const Lesson& l = current();
  if (measure_value < l.threshold || episodes_in_lesson < l.min_lesson_length) return false;
  ++index_;
  return true;
}

protocol::SideChannel Curriculum::side_channel() const {
  protocol::ParamList params;
  for (const auto& [key, value] : current().params) params.emplace_back(key, static_cast<float>(value));
  return {protocol::kChannelEnvParams, protocol::encode_env_params(params)};
}

void Curriculum::apply(kernel::Academy& academy) const {
  protocol::apply_side_channel(academy, side_channel());
}

}  // namespace agentsim::trainer
