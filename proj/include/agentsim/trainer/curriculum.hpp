#pragma once

#include <map>
#include <string>
#include <vector>

#include "agentsim/kernel/academy.hpp"
#include "agentsim/protocol/messages.hpp"
#include "json.hpp"

namespace agentsim::trainer {

enum class Measure { kMeanReward, kProgress };

struct Lesson {
  std::map<std::string, double> params;
  Measure measure = Measure::kMeanReward;
  double threshold = 0.0;
  int min_lesson_length = 0;  // episodes
};

struct LessonPlan {
  std::vector<Lesson> lessons;
  bool empty() const { return lessons.empty(); }
};

LessonPlan lesson_plan_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LessonPlan& plan);

class Curriculum {
 public:
  explicit Curriculum(LessonPlan plan);

  std::size_t lesson() const { return index_; }
  const Lesson& current() const { return plan_.lessons.at(index_); }
  bool final_lesson() const { return index_ + 1 >= plan_.lessons.size(); }
  const LessonPlan& plan() const { return plan_; }

  // Moves to the next lesson when the current lesson's completion rule is
  // met; the last lesson never completes. Returns true on advancement.
  bool advance(double measure_value, int episodes_in_lesson);

  // Environment-parameter side-channel message for the current lesson.
  protocol::SideChannel side_channel() const;
  // Sends the current lesson's parameters through the side channel handler
  // (read by the environment at the next episode reset).
  void apply(kernel::Academy& academy) const;

 private:
  LessonPlan plan_;
  std::size_t index_ = 0;
};

}  // namespace agentsim::trainer
