#pragma once

// On-disk corpus layout:
//
//   <root>/labels.csv            participant_id,depression,anxiety,stress
//   <root>/<participant_id>/task1.svc ... task7.svc
//
// Participants are visited in participant_id order.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "emothaw/dass.hpp"
#include "emothaw/error.hpp"
#include "emothaw/svc.hpp"

namespace emothaw {

namespace fs = std::filesystem;

inline constexpr std::string_view kLabelsFileName = "labels.csv";
inline constexpr std::string_view kLabelsHeader = "participant_id,depression,anxiety,stress";

struct LabelRow {
  std::string participant_id;
  DassScores scores;

  bool operator==(const LabelRow&) const = default;
};

inline std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(Errc::IoError, "read failed for " + path.string());
  return std::move(buf).str();
}

inline void write_text_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

/// Splits text into lines, dropping a trailing CR and skipping blank lines.
inline std::vector<std::pair<std::size_t, std::string_view>> text_lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::size_t pos = 0, no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    lines.emplace_back(no, line);
  }
  return lines;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

/// Parses the label CSV; rows are returned sorted by participant_id.
inline std::vector<LabelRow> parse_labels_csv(std::string_view text) {
  auto lines = text_lines(text);
  if (lines.empty()) throw Error(Errc::EmptyInput, "label file is empty");
  if (lines.front().second != kLabelsHeader)
    throw Error(Errc::MalformedRow, "label header must be '" + std::string(kLabelsHeader) + "'");
  std::vector<LabelRow> rows;
  std::set<std::string, std::less<>> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto [no, line] = lines[i];
    const std::string where = "labels line " + std::to_string(no) + ": ";
    auto fields = split_csv(line);
    if (fields.size() != 4) throw Error(Errc::MalformedRow, where + "expected 4 fields");
    if (fields[0].empty()) throw Error(Errc::MalformedRow, where + "empty participant_id");
    LabelRow row;
    row.participant_id = std::string(fields[0]);
    int* targets[3] = {&row.scores.depression, &row.scores.anxiety, &row.scores.stress};
    for (int k = 0; k < 3; ++k) {
      auto v = detail::parse_int(fields[static_cast<std::size_t>(k) + 1]);
      if (!v) throw Error(Errc::MalformedRow, where + "score is not an integer");
      if (*v < 0 || *v > kMaxScaleScore)
        throw Error(Errc::ScoreOutOfRange, where + "score outside [0, 42]");
      *targets[k] = static_cast<int>(*v);
    }
    if (!seen.insert(row.participant_id).second)
      throw Error(Errc::MalformedRow, where + "duplicate participant_id " + row.participant_id);
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(),
            [](const LabelRow& a, const LabelRow& b) { return a.participant_id < b.participant_id; });
  return rows;
}

inline std::string format_labels_csv(const std::vector<LabelRow>& rows) {
  std::string out(kLabelsHeader);
  out.push_back('\n');
  for (const auto& r : rows) {
    out += r.participant_id + ',' + std::to_string(r.scores.depression) + ',' +
           std::to_string(r.scores.anxiety) + ',' + std::to_string(r.scores.stress) + '\n';
  }
  return out;
}

inline fs::path task_file_path(const fs::path& participant_dir, TaskId task) {
  return participant_dir / ("task" + std::to_string(task_number(task)) + ".svc");
}

/// Participant directories under the corpus root, sorted by name.
inline std::vector<std::string> list_participant_dirs(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(Errc::IoError, root.string() + " is not a directory");
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root, ec)) {
    if (entry.is_directory()) ids.push_back(entry.path().filename().string());
  }
  if (ec) throw Error(Errc::IoError, "cannot list " + root.string() + ": " + ec.message());
  std::sort(ids.begin(), ids.end());
  return ids;
}

enum class FileStatus { Pass, Warn, Fail };

constexpr std::string_view file_status_name(FileStatus s) noexcept {
  switch (s) {
    case FileStatus::Pass: return "pass";
    case FileStatus::Warn: return "warn";
    case FileStatus::Fail: return "fail";
  }
  return "unknown";
}

struct FileReport {
  std::string path;  // relative to the corpus root
  FileStatus status = FileStatus::Pass;
  std::vector<std::string> messages;
};

struct LoadedCorpus {
  std::vector<Session> sessions;  // participant_id order
  std::vector<FileReport> files;

  std::size_t failures() const noexcept {
    return static_cast<std::size_t>(std::count_if(
        files.begin(), files.end(), [](const FileReport& f) { return f.status == FileStatus::Fail; }));
  }
};

/// Reads every recording and the label file. Per-file problems are recorded in
/// `files` rather than thrown, so one corrupted recording does not hide the
/// rest; a session keeps only the recordings that parsed. Throws EmptyCorpus
/// when the root holds neither participant directories nor labels.
inline LoadedCorpus load_corpus(const fs::path& root, ParseMode mode) {
  LoadedCorpus corpus;
  const auto dirs = list_participant_dirs(root);
  const fs::path labels_path = root / kLabelsFileName;
  std::error_code ec;
  const bool has_labels = fs::is_regular_file(labels_path, ec);
  if (dirs.empty() && !has_labels) throw Error(Errc::EmptyCorpus, root.string() + " is empty");

  std::vector<LabelRow> labels;
  {
    FileReport report{std::string(kLabelsFileName), FileStatus::Pass, {}};
    try {
      if (!has_labels) throw Error(Errc::IoError, "missing " + std::string(kLabelsFileName));
      labels = parse_labels_csv(read_text_file(labels_path));
    } catch (const Error& e) {
      report.status = FileStatus::Fail;
      report.messages.push_back(e.what());
    }
    corpus.files.push_back(std::move(report));
  }

  std::map<std::string, DassScores, std::less<>> score_of;
  for (const auto& l : labels) score_of.emplace(l.participant_id, l.scores);

  std::set<std::string, std::less<>> ids(dirs.begin(), dirs.end());
  for (const auto& l : labels) ids.insert(l.participant_id);

  for (const auto& id : ids) {
    Session session;
    session.participant_id = id;
    auto it = score_of.find(id);
    const bool dir_exists = std::binary_search(dirs.begin(), dirs.end(), id);
    if (it != score_of.end()) {
      session.scores = it->second;
    } else if (has_labels && !labels.empty()) {
      corpus.files.push_back({id, FileStatus::Fail, {"IdMismatch: no label row for " + id}});
    }
    if (!dir_exists) {
      corpus.files.push_back({id, FileStatus::Fail, {"IdMismatch: no directory for " + id}});
    } else {
      for (TaskId task : kAllTasks) {
        const fs::path path = task_file_path(root / id, task);
        FileReport report{(fs::path(id) / path.filename()).generic_string(), FileStatus::Pass, {}};
        if (!fs::exists(path, ec)) {
          report.status = FileStatus::Warn;
          report.messages.push_back("missing task " + std::string(task_roman(task)));
          corpus.files.push_back(std::move(report));
          continue;
        }
        try {
          auto parsed = parse_svc(read_text_file(path), mode, task);
          for (const auto& w : parsed.warnings) {
            report.status = FileStatus::Warn;
            report.messages.push_back(w.line ? "line " + std::to_string(w.line) + ": " + w.message
                                             : w.message);
          }
          session.recordings.emplace(task, std::move(parsed.recording));
        } catch (const Error& e) {
          report.status = FileStatus::Fail;
          report.messages.push_back(e.what());
        }
        corpus.files.push_back(std::move(report));
      }
    }
    corpus.sessions.push_back(std::move(session));
  }
  return corpus;
}

/// Writes sessions in the corpus layout. Existing files are overwritten.
inline void write_corpus(const fs::path& root, const std::vector<Session>& sessions) {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + root.string() + ": " + ec.message());
  std::vector<LabelRow> labels;
  for (const auto& s : sessions) {
    const fs::path dir = root / s.participant_id;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::IoError, "cannot create " + dir.string() + ": " + ec.message());
    for (const auto& [task, rec] : s.recordings) write_text_file(task_file_path(dir, task), serialize_svc(rec));
    labels.push_back({s.participant_id, s.scores});
  }
  std::sort(labels.begin(), labels.end(),
            [](const LabelRow& a, const LabelRow& b) { return a.participant_id < b.participant_id; });
  write_text_file(root / kLabelsFileName, format_labels_csv(labels));
}

}  // namespace emothaw
