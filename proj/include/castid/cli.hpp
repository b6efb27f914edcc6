// Copyright 2026 The castid Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef CASTID_CLI_HPP_
#define CASTID_CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace castid::cli {

namespace fs = std::filesystem;

// Each command returns a process exit code: 0 success, 1 usage, 2 missing
// input, 3 validation, 4 stage failure. Normal output goes to `out`,
// diagnostics to `err`.

int cmd_validate(const fs::path& manifest, std::ostream& out, std::ostream& err);

int cmd_simulate(const std::optional<fs::path>& config, const fs::path& out_dir,
                 std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err);

// stage: "1", "2", "voice", "3" or "all".
int cmd_run(const fs::path& manifest, const std::optional<fs::path>& config,
            const fs::path& out_dir, const std::string& stage,
            std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err);

int cmd_eval(const fs::path& labels, const fs::path& gt, const fs::path& out_dir,
             std::ostream& out, std::ostream& err);

int cmd_spectrogram(const fs::path& wav, const fs::path& out_path, std::ostream& out,
                    std::ostream& err);

int cmd_augment(const fs::path& in_dir, const fs::path& out_dir, bool grayscale,
                std::ostream& out, std::ostream& err);

}  // namespace castid::cli

#endif  // CASTID_CLI_HPP_
