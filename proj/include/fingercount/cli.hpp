#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fingercount/segmenter.hpp"
#include "fingercount/synth.hpp"

namespace fingercount {

struct EvalRow {
    int count = 0;
    int files = 0;
    int correct = 0;
    double accuracy_pct = 0;  // 100 * correct / files
};

struct EvalFailure {
    std::string path;
    int expected = 0;
    int got = -1;
    std::string error;  // non-empty when processing threw
};

struct EvalReport {
    std::vector<EvalRow> rows;  // sorted by count, only counts with files
    int total_files = 0;
    int total_correct = 0;
    double overall_pct = 0;  // weighted by file count
    std::vector<EvalFailure> failures;  // sorted by count, then path
};

/// Runs count_fingers over every manifest entry (paths resolved against
/// base_dir). Masks are fed to the segmenter directly; with denoise_first
/// they pass through denoise_7of9 beforehand, as frames would in the live
/// pipeline. Throws if a mask file is missing, naming the path.
EvalReport evaluate_manifest(const CorpusManifest& manifest,
                             const std::filesystem::path& base_dir,
                             const ScanParams& params, bool denoise_first);

/// Full command-line interface. `args` excludes the program name.
/// Exit codes: 0 success, 1 processing error, 2 usage or I/O error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fingercount
