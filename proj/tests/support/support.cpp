#include "support.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace tfsmell::testing {

namespace fs = std::filesystem;

fs::path fixtures() { return fs::path(TFSMELL_FIXTURES); }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

TempDir::TempDir() {
  std::string pattern = (fs::temp_directory_path() / "tfsmell-test-XXXXXX").string();
  if (!mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

namespace {

const char* kRemoteBackend = R"(terraform {
  backend "gcs" {
    bucket = "state"
    prefix = "corpus"
  }
}
)";

const char* kLocalBackend = R"(terraform {
  backend "local" {}
}
)";

std::string snippet(SmellId smell) {
  if (smell == SS1) {
    return R"(
resource "aws_instance" "big" {
  ami           = "ami-123"
  instance_type = "m5.8xlarge"
}
)";
  }
  if (smell == SS2) {
    return R"(
resource "aws_instance" "fleet" {
  count         = 3
  ami           = "ami-123"
  instance_type = "t3.micro"
}
)";
  }
  if (smell == SS3) {
    return R"(
resource "aws_ebs_volume" "data" {
  size = 10
}
)";
  }
  if (smell == SS4) {
    return R"(
resource "aws_cloudwatch_log_group" "logs" {
  name              = "app"
  retention_in_days = 365
}
)";
  }
  if (smell == SS5) {
    return R"(
resource "google_compute_subnetwork" "east" {
  name   = "east"
  region = "us-east1"
}

resource "google_compute_instance" "west" {
  name         = "west"
  machine_type = "e2-small"
  zone         = "us-west1-b"

  network_interface {
    subnetwork = google_compute_subnetwork.east.id
  }
}
)";
  }
  if (smell == SS7) {
    std::string out;
    for (int i = 0; i < 10; ++i) {
      out += "\nresource \"aws_s3_bucket\" \"b" + std::to_string(i) + "\" {\n  bucket = \"bucket-" +
             std::to_string(i) + "\"\n}\n";
    }
    return out;
  }
  return {};
}

}  // namespace

std::vector<SourceFile> synthetic_corpus(std::size_t total, const PlantPlan& plan) {
  std::vector<SourceFile> out;
  for (std::size_t i = 0; i < total; ++i) {
    auto has = [&](SmellId s) {
      auto it = plan.find(s);
      return it != plan.end() && it->second.contains(i);
    };
    std::string text = has(SS6) ? kLocalBackend : kRemoteBackend;
    text += "\nresource \"aws_sqs_queue\" \"filler\" {\n  name = \"q" + std::to_string(i) + "\"\n}\n";
    for (auto s : kBuiltinSmells) {
      if (s != SS6 && has(s)) text += snippet(s);
    }
    char dir[16];
    std::snprintf(dir, sizeof dir, "d%03zu", i);
    out.push_back({std::string(dir) + "/main.tf", text});
  }
  return out;
}

void write_corpus(const fs::path& root, const std::vector<SourceFile>& files) {
  for (const auto& f : files) write_file(root / f.path, f.content.value_or(""));
}

PlantPlan random_plan(std::size_t total, const std::map<SmellId, std::size_t>& counts, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  PlantPlan plan;
  for (const auto& [smell, count] : counts) {
    std::vector<std::size_t> idx(total);
    for (std::size_t i = 0; i < total; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), gen);
    plan[smell] = std::set<std::size_t>(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count));
  }
  return plan;
}

const std::vector<std::string>& block_pool() {
  static const std::vector<std::string> pool{
      "resource \"aws_instance\" \"r{}\" {\n  ami           = \"ami-{}\"\n  instance_type = \"t3.micro\"\n}\n",
      "variable \"v{}\" {\n  type    = string\n  default = \"x\"\n}\n",
      "locals {\n  l{} = [for s in var.list : upper(s)]\n  m{} = { a = 1, b = \"two\" }\n}\n",
      "output \"o{}\" {\n  value = aws_instance.r{}.id\n}\n",
      "module \"m{}\" {\n  source = \"./mod\"\n  tags = {\n    Name = \"n-${var.env}\"\n  }\n}\n",
      "data \"aws_ami\" \"d{}\" {\n  filter {\n    name   = \"name\"\n    values = [\"a\", \"b\"]\n  }\n}\n",
      "resource \"aws_iam_policy\" \"p{}\" {\n  policy = <<EOT\n{ \"v\": 1 }\nEOT\n}\n",
      "x{} = 42\n",
  };
  return pool;
}

std::string instantiate(std::string tmpl, std::size_t n) {
  for (auto pos = tmpl.find("{}"); pos != std::string::npos; pos = tmpl.find("{}", pos)) {
    tmpl.replace(pos, 2, std::to_string(n));
  }
  return tmpl;
}

}  // namespace tfsmell::testing
