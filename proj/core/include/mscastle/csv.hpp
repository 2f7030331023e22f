#ifndef MSCASTLE_CSV_HPP_
#define MSCASTLE_CSV_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "mscastle/model.hpp"
#include "mscastle/types.hpp"
#include "mscastle/wavelet.hpp"

namespace mscastle {

// Panel files: header `time,<series...>`, one row per observation, '.'
// decimal, no missing values. Parse failures raise InvalidDataError naming
// the 1-based line.
std::string panel_to_csv(const TimeSeriesPanel& panel);
TimeSeriesPanel panel_from_csv(const std::string& text,
                               const std::string& origin = "<string>");
void write_panel_csv(const std::filesystem::path& path,
                     const TimeSeriesPanel& panel);
TimeSeriesPanel read_panel_csv(const std::filesystem::path& path);

// Coefficient files: header `scale,lag,parent,<caused series...>`, one row
// per (scale, lag, parent series). Values are written with 17 significant
// digits so a round-trip is lossless. A file may carry the whole stack or a
// single (scale, lag) block; readers merge any number of files.
std::string stack_to_csv(const StackedCausalMatrix& stack,
                         const std::vector<std::string>& series_names);
std::string block_to_csv(const StackedCausalMatrix& stack, int scale, int lag,
                         const std::vector<std::string>& series_names);
StackedCausalMatrix stack_from_csv_files(
    const std::vector<std::filesystem::path>& paths);
void write_stack_csv(const std::filesystem::path& path,
                     const StackedCausalMatrix& stack,
                     const std::vector<std::string>& series_names);
// One file per (scale, lag) block, named `<prefix>_s<scale>_l<lag>.csv`.
std::vector<std::filesystem::path> write_stack_blocks(
    const std::filesystem::path& dir, const std::string& prefix,
    const StackedCausalMatrix& stack,
    const std::vector<std::string>& series_names);
// Collects `<prefix>_s*_l*.csv` under dir (sorted) and merges them.
std::vector<std::filesystem::path> stack_block_files(
    const std::filesystem::path& dir, const std::string& prefix);

// Edge list: header `source,target,scale,lag,weight` with series names.
std::string edges_to_csv(const CausalGraphEstimate& graph,
                         const std::vector<std::string>& series_names);

// Augmented panel as written by the decompose command: detail columns named
// `<series>@s<scale>`.
std::string augmented_to_csv(const ScaleAugmentedPanel& aug,
                             const std::vector<std::string>& timestamps);
std::string smooth_to_csv(const ScaleAugmentedPanel& aug,
                          const std::vector<std::string>& timestamps);
std::string energy_shares_to_csv(const Matrix& shares,
                                 const std::vector<std::string>& series_names);

}  // namespace mscastle

#endif  // MSCASTLE_CSV_HPP_
