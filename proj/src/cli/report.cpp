#include "report.hpp"

#include "thermo/cli.hpp"
#include "thermo/trace.hpp"

namespace thermo::cli {

Report::Report(std::vector<std::string> command) : command_(std::move(command)) {}

void Report::add_input(const std::string& path, std::string_view content) {
  inputs_.push_back(Json{{"path", path}, {"fnv1a64", content_hash(content)}, {"bytes", content.size()}});
}

void Report::warn(std::string message) { warnings_.push_back(std::move(message)); }

Json Report::to_json() const {
  Json j;
  j["schema"] = 1;
  j["tool"] = "thermo";
  j["version"] = kVersion;
  j["command"] = command_;
  j["inputs"] = inputs_;
  j["results"] = results_;
  j["warnings"] = warnings_;
  return j;
}

std::string Report::dump() const { return to_json().dump(2) + "\n"; }

void Console::warning(const std::string& message) const {
  if (color) {
    err << "\x1b[33mwarning:\x1b[0m " << message << '\n';
  } else {
    err << "warning: " << message << '\n';
  }
}

void Console::error(const std::string& message) const {
  if (color) {
    err << "\x1b[31merror:\x1b[0m " << message << '\n';
  } else {
    err << "error: " << message << '\n';
  }
}

int finish(const Console& console, const Report& report, const std::string& report_path, int code) {
  for (const auto& w : report.warnings()) console.warning(w);
  const std::string text = report.dump();
  if (!report_path.empty()) {
    try {
      write_text_file(report_path, text);
    } catch (const std::exception& e) {
      console.error(e.what());
      return kUsageError;
    }
  }
  if (console.json) console.out << text;
  return code;
}

}  // namespace thermo::cli
