// src/http.cpp

// Copyright 2026 The easraug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "http.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>

#include "easr/errors.h"

namespace easr::http {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw ConfigError("invalid URL: " + url);
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

httplib::Headers to_httplib(const Headers& headers) {
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  return h;
}

Response finish(const httplib::Result& res, const std::string& url) {
  if (!res) {
    throw BackendError("HTTP request to " + url + " failed: " + httplib::to_string(res.error()));
  }
  return {res->status, res->body};
}

}  // namespace

Response post(const std::string& url, const std::string& body, const std::string& content_type,
              const Headers& headers, int timeout_s) {
  const SplitUrl u = split_url(url);
  httplib::Client cli(u.origin);
  cli.set_connection_timeout(timeout_s, 0);
  cli.set_read_timeout(timeout_s, 0);
  cli.set_write_timeout(timeout_s, 0);
  return finish(cli.Post(u.path, to_httplib(headers), body, content_type), url);
}

Response post_multipart(const std::string& url, const std::vector<FormField>& fields,
                        const Headers& headers, int timeout_s) {
  const SplitUrl u = split_url(url);
  httplib::Client cli(u.origin);
  cli.set_connection_timeout(timeout_s, 0);
  cli.set_read_timeout(timeout_s, 0);
  cli.set_write_timeout(timeout_s, 0);
  httplib::MultipartFormDataItems items;
  for (const auto& f : fields) items.push_back({f.name, f.content, f.filename, f.content_type});
  return finish(cli.Post(u.path, to_httplib(headers), items), url);
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::string run_command(const std::string& command, const std::string& input) {
  namespace fs = std::filesystem;
  std::string tmpl = (fs::temp_directory_path() / "easr-stdin-XXXXXX").string();
  const int fd = ::mkstemp(tmpl.data());
  if (fd < 0) throw BackendError("cannot create temp file for command input");
  ::close(fd);
  {
    std::ofstream f(tmpl, std::ios::binary | std::ios::trunc);
    f << input;
  }
  const std::string full = "( " + command + " ) < " + shell_quote(tmpl);
  FILE* pipe = ::popen(full.c_str(), "r");
  if (!pipe) {
    fs::remove(tmpl);
    throw BackendError("cannot run command: " + command);
  }
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
  const int status = ::pclose(pipe);
  std::error_code ec;
  fs::remove(tmpl, ec);
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw BackendError("command failed (status " + std::to_string(status) + "): " + command);
  }
  return out;
}

}  // namespace easr::http
