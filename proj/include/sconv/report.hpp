#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace sconv {

/// Shortest decimal text that reads back to the same double ("nan"/"inf" otherwise).
std::string format_number(double v);

/// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Comma-separated table written row by row.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    CsvWriter& cell(double v);
    CsvWriter& cell(std::string_view text);
    CsvWriter& cell(std::size_t v);
    void end_row();

private:
    std::ofstream out_;
    bool row_started_ = false;
};

}  // namespace sconv
