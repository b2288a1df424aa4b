/* Thin CLI over the swapqoc C API. */
#include <stdio.h>
#include <string.h>

#include "swapqoc/capi.h"

int main(int argc, char** argv) {
  if (argc == 2 && strcmp(argv[1], "--version") == 0) {
    printf("%s\n", swq_version());
    return 0;
  }
  return swq_run(argc - 1, (const char* const*)(argv + 1));
}
