#include "gxt/image.hpp"

#include <png.h>

#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>

#include "gxt/error.hpp"

namespace gxt {

Image::Image(int w, int h, std::array<std::uint8_t, 4> fill) : width(w), height(h) {
  if (w < 0 || h < 0) throw DomainError("negative image size");
  rgba.resize(4 * static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (std::size_t i = 0; i < rgba.size(); i += 4) std::memcpy(&rgba[i], fill.data(), 4);
}

void Image::blit(const Image& src, int x0, int y0) {
  for (int y = 0; y < src.height; ++y) {
    const int ty = y0 + y;
    if (ty < 0 || ty >= height) continue;
    for (int x = 0; x < src.width; ++x) {
      const int tx = x0 + x;
      if (tx < 0 || tx >= width) continue;
      std::memcpy(at(tx, ty), src.at(x, y), 4);
    }
  }
}

namespace {

struct ReadCursor {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos;
};

void on_write(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + len);
}

void on_flush(png_structp) {}

void on_read(png_structp png, png_bytep data, png_size_t len) {
  auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cur->pos + len > cur->size) png_error(png, "truncated PNG stream");
  std::memcpy(data, cur->data + cur->pos, len);
  cur->pos += len;
}

// Returns false on a libpng error. Kept free of objects with destructors
// between setjmp and the last libpng call.
bool encode_into(const Image& img, std::vector<png_bytep>& rows, std::vector<png_text>& texts,
                 std::vector<std::uint8_t>* out) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, out, on_write, on_flush);
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
               PNG_COLOR_TYPE_RGB_ALPHA, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  if (!texts.empty()) png_set_text(png, info, texts.data(), static_cast<int>(texts.size()));
  png_set_rows(png, info, rows.data());
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

bool decode_into(ReadCursor* cur, Image* img) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, cur, on_read);
  png_read_png(png, info,
               PNG_TRANSFORM_STRIP_16 | PNG_TRANSFORM_PACKING | PNG_TRANSFORM_EXPAND | PNG_TRANSFORM_GRAY_TO_RGB, nullptr);
  const auto w = png_get_image_width(png, info);
  const auto h = png_get_image_height(png, info);
  const int channels = png_get_channels(png, info);
  png_bytepp rows = png_get_rows(png, info);
  img->width = static_cast<int>(w);
  img->height = static_cast<int>(h);
  img->rgba.assign(4 * static_cast<std::size_t>(w) * h, 255);
  for (png_uint_32 y = 0; y < h; ++y) {
    for (png_uint_32 x = 0; x < w; ++x) {
      std::uint8_t* dst = &img->rgba[4 * (static_cast<std::size_t>(y) * w + x)];
      const png_bytep src = rows[y] + static_cast<std::size_t>(x) * channels;
      for (int c = 0; c < std::min(channels, 4); ++c) dst[c] = src[c];
    }
  }
  png_textp text = nullptr;
  const int n_text = png_get_text(png, info, &text, nullptr);
  for (int i = 0; i < n_text; ++i) {
    img->text.emplace_back(text[i].key, std::string(text[i].text, text[i].text_length));
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const Image& img) {
  if (img.rgba.size() != 4 * static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height)) {
    throw ShapeError("pixel buffer does not match image size");
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
  for (int y = 0; y < img.height; ++y) {
    rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(img.at(0, y));
  }
  std::vector<png_text> texts(img.text.size());
  for (std::size_t i = 0; i < img.text.size(); ++i) {
    texts[i].compression = PNG_TEXT_COMPRESSION_NONE;
    texts[i].key = const_cast<char*>(img.text[i].first.c_str());
    texts[i].text = const_cast<char*>(img.text[i].second.c_str());
    texts[i].text_length = img.text[i].second.size();
  }
  std::vector<std::uint8_t> out;
  if (!encode_into(img, rows, texts, &out)) throw InternalError("PNG encoding failed");
  return out;
}

Image decode_png(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw FormatError("not a PNG stream");
  ReadCursor cur{bytes.data(), bytes.size(), 0};
  Image img;
  if (!decode_into(&cur, &img)) throw FormatError("corrupt PNG stream");
  return img;
}

void write_png(const std::filesystem::path& path, const Image& img) {
  const auto bytes = encode_png(img);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

Image read_png(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_png(bytes);
}

}  // namespace gxt
