#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "thermo/serialize.hpp"

namespace thermo::cli {

// Versioned report envelope shared by every subcommand. Contains no
// timestamps or host data so identical invocations give identical bytes.
class Report {
 public:
  explicit Report(std::vector<std::string> command);

  void add_input(const std::string& path, std::string_view content);
  void warn(std::string message);

  Json& results() { return results_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  Json to_json() const;
  std::string dump() const;

 private:
  std::vector<std::string> command_;
  Json inputs_ = Json::array();
  Json results_ = Json::object();
  std::vector<std::string> warnings_;
};

struct Console {
  std::ostream& out;
  std::ostream& err;
  bool color = false;
  bool quiet = false;
  bool json = false;

  void warning(const std::string& message) const;
  void error(const std::string& message) const;
};

/// Prints the report (stdout with --json, file with --report) and returns `code`.
int finish(const Console& console, const Report& report, const std::string& report_path, int code);

}  // namespace thermo::cli
