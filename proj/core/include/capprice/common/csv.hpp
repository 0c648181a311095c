#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace capprice {

/// Minimal reader for the plain comma-separated files used by the instance
/// format: no quoting, blank lines skipped, fields trimmed.
class CsvReader {
public:
    explicit CsvReader(const std::filesystem::path& path);

    /// Checks the first non-blank line equals the expected column list.
    void expect_header(const std::vector<std::string>& columns);
    bool next();

    const std::vector<std::string>& fields() const { return fields_; }
    int line() const { return line_; }
    const std::string& file() const { return file_; }

    double number(std::size_t col, const std::string& field) const;
    int integer(std::size_t col, const std::string& field) const;
    [[noreturn]] void fail(const std::string& field, const std::string& message) const;

private:
    std::string file_;
    std::vector<std::string> lines_;
    std::size_t next_ = 0;
    int line_ = 0;
    std::vector<std::string> fields_;
};

std::vector<std::string> split_csv_line(const std::string& line);

/// Writes rows of already formatted fields with LF line endings.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& fields);

private:
    std::string path_;
    std::ofstream out_;
};

}  // namespace capprice
