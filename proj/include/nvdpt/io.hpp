#pragma once

#include "nvdpt/spectra.hpp"
#include "nvdpt/sweep.hpp"
#include "nvdpt/transitions.hpp"
#include "nvdpt/zefoz.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nvdpt {

enum class Format { Csv, Json };

Format parse_format(std::string_view name);

// Shortest decimal that round-trips to the same double; "nan"/"inf" for non-finite values.
std::string format_number(double x);

std::string format_levels(const LevelSet& levels, Format format);
std::string format_tracked(const TrackedSpectrum& tracked, Format format);
std::string format_transitions(std::span<const TransitionRecord> records, Format format);
std::string format_lacs(std::span<const LacRecord> lacs, Format format);
std::string format_dpts(std::span<const DptRecord> dpts, Format format);
std::string format_spectrum(const SpectrumTrace& trace, Format format);
std::string format_assignments(std::span<const PeakAssignment> assignments);

std::vector<TransitionRecord> parse_transitions(std::string_view text);
std::vector<MeasuredPeak> parse_peaks_csv(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);

// Writes through a temporary file in the target directory and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace nvdpt
