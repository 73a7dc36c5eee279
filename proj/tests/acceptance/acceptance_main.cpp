#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

// Acceptance binary: one test case per release criterion; each prints a
// single [criterion N] PASS/FAIL line. Run it bare for the whole gate or
// with -tc=criterion_N_* for one criterion (the ctest wiring does that).
int main(int argc, char** argv) {
  doctest::Context ctx;
  ctx.setOption("duration", true);
  ctx.applyCommandLine(argc, argv);
  int res = ctx.run();
  if (ctx.shouldExit()) return res;
  return res;
}
