#pragma once

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "spreadq/error.hpp"
#include "spreadq/marketdata.hpp"
#include "spreadq/synthetic.hpp"

namespace testing {

inline spreadq::AssetSeries series(const std::string& symbol, const std::vector<double>& closes,
                                   spreadq::Date start = spreadq::make_date(2015, 1, 1)) {
    const auto dates = spreadq::business_days(start, closes.size());
    std::vector<spreadq::Bar> rows(closes.size());
    for (std::size_t i = 0; i < closes.size(); ++i) {
        rows[i] = spreadq::Bar{dates[i], closes[i] * 0.999 + 0.001 * static_cast<double>(i % 3), closes[i],
                               1000.0 + 37.0 * static_cast<double>(i % 11)};
    }
    return spreadq::AssetSeries(symbol, std::move(rows));
}

inline spreadq::DateRange full_range(const spreadq::PairSeries& p) {
    return spreadq::DateRange{p.date(0), p.date(p.size() - 1)};
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("spreadq_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

template <typename F>
spreadq::ErrorCode error_code_of(F&& f) {
    try {
        f();
    } catch (const spreadq::Error& e) {
        return e.code();
    }
    FAIL("expected a spreadq::Error");
    return spreadq::ErrorCode::InvalidArgument;
}

}  // namespace testing
