// src/http.h

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

// Thin POST helpers over cpp-httplib, kept out of the public headers so
// only one translation unit pays for httplib.h.

#ifndef EASR_SRC_HTTP_H_
#define EASR_SRC_HTTP_H_

#include <string>
#include <utility>
#include <vector>

namespace easr::http {

struct Response {
  int status = 0;
  std::string body;
};

struct FormField {
  std::string name;
  std::string content;
  std::string filename;  // empty for plain fields
  std::string content_type;
};

using Headers = std::vector<std::pair<std::string, std::string>>;

/// `url` is a full URL (scheme, host, optional port, path). Transport
/// failures throw BackendError; HTTP error statuses are returned.
Response post(const std::string& url, const std::string& body,
              const std::string& content_type, const Headers& headers, int timeout_s);

Response post_multipart(const std::string& url, const std::vector<FormField>& fields,
                        const Headers& headers, int timeout_s);

/// Runs `command` through the shell with `input` on stdin; returns stdout.
/// Throws BackendError on a nonzero exit status.
std::string run_command(const std::string& command, const std::string& input);

/// Single-quotes `s` for /bin/sh.
std::string shell_quote(const std::string& s);

}  // namespace easr::http

#endif  // EASR_SRC_HTTP_H_
