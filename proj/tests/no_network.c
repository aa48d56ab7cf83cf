// tests/no_network.c

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

// LD_PRELOAD shim that refuses any connection or datagram to a host other
// than loopback. With NO_NETWORK_STRICT=1 the process aborts instead, so a
// test that touches the network cannot pass.

#define _GNU_SOURCE
#include <arpa/inet.h>
#include <dlfcn.h>
#include <errno.h>
#include <netinet/in.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <sys/socket.h>
#include <sys/un.h>

static volatile int g_blocked = 0;

int no_network_active(void) { return 1; }
int no_network_blocked_count(void) { return g_blocked; }

static int is_local(const struct sockaddr* addr, socklen_t len) {
  if (addr == NULL) return 1;  // connected socket; checked at connect()
  switch (addr->sa_family) {
    case AF_UNIX:
    case AF_UNSPEC:
      return 1;
    case AF_INET: {
      if (len < (socklen_t)sizeof(struct sockaddr_in)) return 0;
      const struct sockaddr_in* in = (const struct sockaddr_in*)addr;
      return (ntohl(in->sin_addr.s_addr) >> 24) == 127;
    }
    case AF_INET6: {
      if (len < (socklen_t)sizeof(struct sockaddr_in6)) return 0;
      const struct sockaddr_in6* in6 = (const struct sockaddr_in6*)addr;
      if (IN6_IS_ADDR_LOOPBACK(&in6->sin6_addr)) return 1;
      if (IN6_IS_ADDR_V4MAPPED(&in6->sin6_addr)) return in6->sin6_addr.s6_addr[12] == 127;
      return 0;
    }
    default:
      return 0;
  }
}

static int refuse(const char* what) {
  ++g_blocked;
  const char* strict = getenv("NO_NETWORK_STRICT");
  fprintf(stderr, "no_network: blocked %s to a non-loopback address\n", what);
  if (strict && strcmp(strict, "1") == 0) abort();
  errno = EACCES;
  return -1;
}

int connect(int fd, const struct sockaddr* addr, socklen_t len) {
  static int (*real)(int, const struct sockaddr*, socklen_t) = NULL;
  if (!is_local(addr, len)) return refuse("connect");
  if (!real) real = (int (*)(int, const struct sockaddr*, socklen_t))dlsym(RTLD_NEXT, "connect");
  return real(fd, addr, len);
}

ssize_t sendto(int fd, const void* buf, size_t n, int flags, const struct sockaddr* addr,
               socklen_t len) {
  static ssize_t (*real)(int, const void*, size_t, int, const struct sockaddr*, socklen_t) = NULL;
  if (!is_local(addr, len)) return refuse("sendto");
  if (!real) {
    real = (ssize_t(*)(int, const void*, size_t, int, const struct sockaddr*, socklen_t))dlsym(
        RTLD_NEXT, "sendto");
  }
  return real(fd, buf, n, flags, addr, len);
}

ssize_t sendmsg(int fd, const struct msghdr* msg, int flags) {
  static ssize_t (*real)(int, const struct msghdr*, int) = NULL;
  if (msg && !is_local((const struct sockaddr*)msg->msg_name, msg->msg_namelen)) {
    return refuse("sendmsg");
  }
  if (!real) real = (ssize_t(*)(int, const struct msghdr*, int))dlsym(RTLD_NEXT, "sendmsg");
  return real(fd, msg, flags);
}
