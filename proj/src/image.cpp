#include "sgrbm/image.hpp"

#include <fstream>

#include "sgrbm/errors.hpp"

namespace sgrbm {

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in, const std::string& path) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  if (c == EOF) throw ParseError(path + ": truncated PGM header");
  std::string token;
  while (c != EOF && !std::isspace(c)) {
    token.push_back(static_cast<char>(c));
    c = in.get();
  }
  return token;
}

int parse_positive(const std::string& token, const std::string& path, const char* what) {
  try {
    std::size_t pos = 0;
    const int value = std::stoi(token, &pos);
    if (pos != token.size() || value <= 0) throw std::invalid_argument("range");
    return value;
  } catch (const std::exception&) {
    throw ParseError(path + ": invalid PGM " + what + " '" + token + "'");
  }
}

}  // namespace

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");

  char m0 = 0, m1 = 0;
  in.get(m0).get(m1);
  if (!in || m0 != 'P' || m1 != '5') {
    throw ParseError(path + ": not a binary PGM (P5) file");
  }

  GrayImage image;
  image.width = parse_positive(next_token(in, path), path, "width");
  image.height = parse_positive(next_token(in, path), path, "height");
  const int maxval = parse_positive(next_token(in, path), path, "maxval");
  if (maxval != 255) throw ParseError(path + ": unsupported maxval " + std::to_string(maxval));
  // next_token consumed the single whitespace byte after maxval

  const std::size_t count = static_cast<std::size_t>(image.width) * image.height;
  image.pixels.resize(count);
  in.read(reinterpret_cast<char*>(image.pixels.data()), static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count) {
    throw ParseError(path + ": truncated pixel data, expected " + std::to_string(count) +
                     " bytes, got " + std::to_string(in.gcount()));
  }
  return image;
}

void write_pgm(const std::string& path, const GrayImage& image) {
  if (image.width <= 0 || image.height <= 0 ||
      image.pixels.size() != static_cast<std::size_t>(image.width) * image.height) {
    throw ParameterError("write_pgm: inconsistent image dimensions");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  out << "P5\n" << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw ParseError(path + ": write failed");
}

}  // namespace sgrbm
