#ifndef ESD_COMMANDS_HPP
#define ESD_COMMANDS_HPP

#include <string>

#include "esd/config.hpp"

namespace esd {

// Command bodies. Validation problems throw std::invalid_argument (exit 2),
// numerical failures throw std::runtime_error (exit 3); the spectral check
// returns 3 directly when the tolerance is exceeded.
int cmd_simulate(const Config& cfg, const std::string& out_dir);
int cmd_fit(const Config& cfg, const std::string& out_dir);
int cmd_predict(const Config& cfg, const std::string& out_dir);
int cmd_evaluate(const Config& cfg, const std::string& out_dir);
int cmd_spectral_check(const Config& cfg, const std::string& out_dir);
int cmd_sweep(const Config& cfg, const std::string& out_dir);

}  // namespace esd

#endif
