#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace emothaw {

/// The seven recorded tasks, numbered as on the acquisition sheet.
enum class TaskId : unsigned char {
  Pentagons = 1,
  House = 2,
  Handprint = 3,
  LoopsLeft = 4,
  LoopsRight = 5,
  Clock = 6,
  Cursive = 7,
};

inline constexpr std::array<TaskId, 7> kAllTasks = {
    TaskId::Pentagons, TaskId::House,  TaskId::Handprint, TaskId::LoopsLeft,
    TaskId::LoopsRight, TaskId::Clock, TaskId::Cursive};

/// Tasks that contribute features. The loop tasks have no pen-up movement.
inline constexpr std::array<TaskId, 5> kFeatureTasks = {
    TaskId::Pentagons, TaskId::House, TaskId::Handprint, TaskId::Clock, TaskId::Cursive};

constexpr int task_number(TaskId task) noexcept { return static_cast<int>(task); }

constexpr std::optional<TaskId> task_from_number(int number) noexcept {
  if (number < 1 || number > 7) return std::nullopt;
  return static_cast<TaskId>(number);
}

constexpr bool is_feature_task(TaskId task) noexcept {
  return task != TaskId::LoopsLeft && task != TaskId::LoopsRight;
}

/// Short lowercase name used in column names and report tables.
constexpr std::string_view task_name(TaskId task) noexcept {
  switch (task) {
    case TaskId::Pentagons: return "pentagons";
    case TaskId::House: return "house";
    case TaskId::Handprint: return "handprint";
    case TaskId::LoopsLeft: return "loops_left";
    case TaskId::LoopsRight: return "loops_right";
    case TaskId::Clock: return "clock";
    case TaskId::Cursive: return "cursive";
  }
  return "unknown";
}

constexpr std::string_view task_roman(TaskId task) noexcept {
  constexpr std::array<std::string_view, 7> roman = {"I", "II", "III", "IV", "V", "VI", "VII"};
  return roman[static_cast<std::size_t>(task_number(task) - 1)];
}

}  // namespace emothaw
