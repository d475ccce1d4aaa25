#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace gnireg::cli {

struct Context {
  nlohmann::json cfg;  // fully resolved
  std::filesystem::path out_dir;
  std::vector<std::string> checkpoints;
  bool plot = false;
  std::ostream* out = nullptr;
};

void cmd_train(Context& ctx);
void cmd_spectrum(Context& ctx);
void cmd_dominance(Context& ctx);
void cmd_hesstrace(Context& ctx);
void cmd_layerstats(Context& ctx);
void cmd_calibrate(Context& ctx);
void cmd_sensitivity(Context& ctx);
void cmd_margin(Context& ctx);
void cmd_parseval(Context& ctx);
void cmd_gendata(Context& ctx);

}  // namespace gnireg::cli
