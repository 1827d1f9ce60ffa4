#include "llf/imageio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <png.h>
#include <json.hpp>

#include "llf/filter.hpp"
#include "llf/rng.hpp"

namespace llf {

namespace {

std::string lower_ext(const std::string& path) {
    auto ext = std::filesystem::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext;
}

// ---- PGM ----

int pgm_next_int(std::istream& in, const std::string& path) {
    // whitespace and '#' comments separate header tokens
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
        } else if (!std::isspace(c)) {
            in.unget();
            break;
        }
    }
    int value;
    if (!(in >> value)) throw io_error("truncated PGM header in " + path);
    return value;
}

Image load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path);
    char magic[2];
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || (magic[1] != '2' && magic[1] != '5'))
        throw io_error(path + " is not a P2/P5 PGM file");
    const bool binary = magic[1] == '5';

    const int w = pgm_next_int(in, path);
    const int h = pgm_next_int(in, path);
    const int maxval = pgm_next_int(in, path);
    if (w < 1 || h < 1) throw io_error("bad PGM dimensions in " + path);
    if (maxval != 255 && maxval != 65535)
        throw io_error("unsupported PGM maxval " + std::to_string(maxval) + " in " + path);

    Image img(w, h);
    const double scale = 1.0 / maxval;
    if (binary) {
        in.get();  // single whitespace after maxval
        const size_t n = img.size();
        if (maxval == 255) {
            std::vector<unsigned char> buf(n);
            in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
            if (!in) throw io_error("truncated PGM payload in " + path);
            for (size_t i = 0; i < n; ++i) img.data()[i] = buf[i] * scale;
        } else {
            std::vector<unsigned char> buf(n * 2);
            in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * 2));
            if (!in) throw io_error("truncated PGM payload in " + path);
            for (size_t i = 0; i < n; ++i) {
                const unsigned v = (static_cast<unsigned>(buf[2 * i]) << 8) | buf[2 * i + 1];
                img.data()[i] = v * scale;
            }
        }
    } else {
        for (size_t i = 0; i < img.size(); ++i) {
            long v;
            if (!(in >> v)) throw io_error("truncated PGM payload in " + path);
            if (v < 0 || v > maxval) throw io_error("PGM sample out of range in " + path);
            img.data()[i] = static_cast<double>(v) * scale;
        }
    }
    return img;
}

void save_pgm(const Image& img, const std::string& path, int depth) {
    const int maxval = depth == 8 ? 255 : 65535;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    out << "P5\n" << img.width() << " " << img.height() << "\n" << maxval << "\n";
    if (depth == 8) {
        std::vector<unsigned char> buf(img.size());
        for (size_t i = 0; i < img.size(); ++i) {
            const double v = std::clamp(img.data()[i], 0.0, 1.0);
            buf[i] = static_cast<unsigned char>(std::floor(v * maxval + 0.5));
        }
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size()));
    } else {
        std::vector<unsigned char> buf(img.size() * 2);
        for (size_t i = 0; i < img.size(); ++i) {
            const double v = std::clamp(img.data()[i], 0.0, 1.0);
            const unsigned q = static_cast<unsigned>(std::floor(v * maxval + 0.5));
            buf[2 * i] = static_cast<unsigned char>(q >> 8);
            buf[2 * i + 1] = static_cast<unsigned char>(q & 0xff);
        }
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size()));
    }
    if (!out) throw io_error("failed writing " + path);
}

// ---- PNG ----

Image load_png(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw io_error("cannot open " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(f);
        throw io_error("libpng init failed for " + path);
    }
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(f);
        throw io_error("libpng failed reading " + path);
    }
    png_init_io(png, f);
    png_read_info(png, info);

    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(f);
        throw io_error(path + " is not single-channel grayscale");
    }
    if (depth != 8 && depth != 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(f);
        throw io_error(path + " has unsupported bit depth " + std::to_string(depth));
    }
    if (depth == 16) png_set_swap(png);  // file stores big-endian
    png_read_update_info(png, info);

    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    Image img(w, h);
    const double scale = depth == 8 ? 1.0 / 255.0 : 1.0 / 65535.0;
    const size_t rowbytes = png_get_rowbytes(png, info);
    std::vector<unsigned char> raw(rowbytes * h);
    rows.resize(h);
    for (int y = 0; y < h; ++y) rows[y] = raw.data() + rowbytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(f);

    for (int y = 0; y < h; ++y) {
        if (depth == 8) {
            const unsigned char* r = raw.data() + rowbytes * y;
            for (int x = 0; x < w; ++x) img(x, y) = r[x] * scale;
        } else {
            const uint16_t* r = reinterpret_cast<const uint16_t*>(raw.data() + rowbytes * y);
            for (int x = 0; x < w; ++x) img(x, y) = r[x] * scale;
        }
    }
    return img;
}

void save_png(const Image& img, const std::string& path, int depth) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw io_error("cannot write " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_write_struct(&png, &info);
        std::fclose(f);
        throw io_error("libpng init failed for " + path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(f);
        throw io_error("libpng failed writing " + path);
    }
    png_init_io(png, f);
    png_set_IHDR(png, info, img.width(), img.height(), depth, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (depth == 16) png_set_swap(png);

    const int maxval = depth == 8 ? 255 : 65535;
    const int w = img.width(), h = img.height();
    if (depth == 8) {
        std::vector<unsigned char> row(w);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double v = std::clamp(img(x, y), 0.0, 1.0);
                row[x] = static_cast<unsigned char>(std::floor(v * maxval + 0.5));
            }
            png_write_row(png, row.data());
        }
    } else {
        std::vector<uint16_t> row(w);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double v = std::clamp(img(x, y), 0.0, 1.0);
                row[x] = static_cast<uint16_t>(std::floor(v * maxval + 0.5));
            }
            png_write_row(png, reinterpret_cast<png_bytep>(row.data()));
        }
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(f);
}

// ---- CSV matrix ----

Image load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        int col = 0;
        while (std::getline(ss, cell, ',')) {
            ++col;
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str())
                throw io_error(path + ": unparsable value at row " + std::to_string(lineno) +
                               ", column " + std::to_string(col));
            if (!(v >= 0.0 && v <= 1.0))
                throw io_error(path + ": value " + cell + " outside [0,1] at row " +
                               std::to_string(lineno) + ", column " + std::to_string(col));
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw io_error(path + ": ragged row " + std::to_string(lineno));
        rows.push_back(std::move(row));
    }
    if (rows.empty() || rows.front().empty()) throw io_error(path + " holds no samples");
    Image img(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) img(x, y) = rows[y][x];
    return img;
}

void save_csv(const Image& img, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw io_error("cannot write " + path);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x)
            std::fprintf(f, x + 1 == img.width() ? "%.17g\n" : "%.17g,", img(x, y));
    }
    std::fclose(f);
}

}  // namespace

Image load_image(const std::string& path) {
    const std::string ext = lower_ext(path);
    if (ext == ".pgm") return load_pgm(path);
    if (ext == ".png") return load_png(path);
    if (ext == ".csv") return load_csv(path);
    throw io_error("unsupported image format: " + path);
}

void save_image(const Image& img, const std::string& path, int depth) {
    if (depth != 8 && depth != 16) throw config_error("depth must be 8 or 16");
    const std::string ext = lower_ext(path);
    if (ext == ".pgm") return save_pgm(img, path, depth);
    if (ext == ".png") return save_png(img, path, depth);
    if (ext == ".csv") return save_csv(img, path);
    throw io_error("unsupported image format: " + path);
}

std::pair<Image, Image> synth_pair(uint64_t seed, int width, int height,
                                   const SynthStyleParams& style) {
    if (width < 16 || height < 16)
        throw config_error("synthetic pairs need at least 16x16 pixels");

    Rng rng(seed * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull);
    Image img(width, height, 0.0);

    // Sharp and broad blobs together give both small-detail and edge-scale
    // contrast, so every branch of the remap sees signal.
    const int nblobs = 8 + rng.uniform_int(0, 7);
    const double rmin = 1.5, rmax = 0.18 * std::min(width, height);
    for (int b = 0; b < nblobs; ++b) {
        const double cx = rng.uniform(0.05, 0.95) * (width - 1);
        const double cy = rng.uniform(0.05, 0.95) * (height - 1);
        const double rx = std::exp(rng.uniform(std::log(rmin), std::log(rmax)));
        const double ry = std::exp(rng.uniform(std::log(rmin), std::log(rmax)));
        const double amp = (rng.u01() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.3, 1.0);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const double dx = (x - cx) / rx;
                const double dy = (y - cy) / ry;
                img(x, y) += amp * std::exp(-0.5 * (dx * dx + dy * dy));
            }
        }
    }
    for (size_t i = 0; i < img.size(); ++i) img.data()[i] += rng.uniform(-0.008, 0.008);

    const double lo = min_value(img), hi = max_value(img);
    const double scale = 0.9 / (hi - lo);
    for (size_t i = 0; i < img.size(); ++i)
        img.data()[i] = 0.05 + (img.data()[i] - lo) * scale;

    LlfConfig cfg;  // auto levels
    OrigRemap remap(style.sigma, style.alpha, style.beta);
    Image target = llf_naive(img, remap, cfg);
    for (size_t i = 0; i < target.size(); ++i)
        target.data()[i] = target.data()[i] * style.gamma + style.omega;
    return {std::move(img), std::move(target)};
}

void write_dataset(const std::string& dir, const DatasetManifest& manifest,
                   const std::vector<std::pair<Image, Image>>& pairs, int depth,
                   const std::string& format) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    nlohmann::json j;
    j["seed"] = manifest.seed;
    j["count"] = manifest.count;
    j["width"] = manifest.width;
    j["height"] = manifest.height;
    j["style"] = {{"sigma", manifest.style.sigma}, {"alpha", manifest.style.alpha},
                  {"beta", manifest.style.beta},   {"gamma", manifest.style.gamma},
                  {"omega", manifest.style.omega}};
    j["pairs"] = nlohmann::json::array();
    for (size_t i = 0; i < pairs.size(); ++i) {
        char in_name[64], tg_name[64];
        std::snprintf(in_name, sizeof in_name, "pair_%03zu_input.%s", i, format.c_str());
        std::snprintf(tg_name, sizeof tg_name, "pair_%03zu_target.%s", i, format.c_str());
        save_image(pairs[i].first, (fs::path(dir) / in_name).string(), depth);
        save_image(pairs[i].second, (fs::path(dir) / tg_name).string(), depth);
        j["pairs"].push_back({{"input", in_name},
                              {"target", tg_name},
                              {"split", manifest.splits[i]}});
    }
    std::ofstream out(fs::path(dir) / "manifest.json");
    if (!out) throw io_error("cannot write manifest in " + dir);
    out << j.dump(2) << "\n";
}

DatasetManifest read_dataset_manifest(const std::string& dir) {
    namespace fs = std::filesystem;
    std::ifstream in(fs::path(dir) / "manifest.json");
    if (!in) throw io_error("no manifest.json in " + dir);
    nlohmann::json j;
    in >> j;
    DatasetManifest m;
    m.seed = j.value("seed", 0ull);
    m.count = j.value("count", 0);
    m.width = j.value("width", 0);
    m.height = j.value("height", 0);
    if (j.contains("style")) {
        m.style.sigma = j["style"].value("sigma", 0.2);
        m.style.alpha = j["style"].value("alpha", 1.0);
        m.style.beta = j["style"].value("beta", 1.0);
        m.style.gamma = j["style"].value("gamma", 1.0);
        m.style.omega = j["style"].value("omega", 0.0);
    }
    for (const auto& p : j["pairs"]) {
        m.input_files.push_back(p.at("input").get<std::string>());
        m.target_files.push_back(p.at("target").get<std::string>());
        m.splits.push_back(p.value("split", "train"));
    }
    return m;
}

PairedDataset load_dataset(const std::string& dir, const std::string& split) {
    namespace fs = std::filesystem;
    const DatasetManifest m = read_dataset_manifest(dir);
    PairedDataset ds;
    ds.split = split;
    for (size_t i = 0; i < m.input_files.size(); ++i) {
        if (m.splits[i] != split) continue;
        Image in = load_image((fs::path(dir) / m.input_files[i]).string());
        Image tg = load_image((fs::path(dir) / m.target_files[i]).string());
        if (!in.same_size(tg))
            throw io_error("pair " + m.input_files[i] + " / " + m.target_files[i] +
                           " has mismatched dimensions");
        ds.pairs.emplace_back(std::move(in), std::move(tg));
    }
    return ds;
}

}  // namespace llf
