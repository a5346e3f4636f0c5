#include "twinbeam/twinbeam.h"

#include <math.h>
#include <stdio.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

int main(int argc, char** argv) {
  const char* out = argc > 1 ? argv[1] : "capi_out";
  tb_config* cfg = NULL;
  EXPECT(tb_config_default(&cfg) == TB_OK);

  /* Bad key names the key; the config is left untouched. */
  EXPECT(tb_config_set(cfg, "theta_zero", "1") == TB_ERR_CONFIG);
  EXPECT(strstr(tb_last_error(), "theta_zero") != NULL);
  EXPECT(tb_config_set(cfg, "theta0_mrad", "-1") == TB_ERR_CONFIG);
  EXPECT(strstr(tb_last_error(), "theta0") != NULL);
  EXPECT(tb_exit_code(TB_ERR_CONFIG) == 2);
  EXPECT(tb_exit_code(TB_ERR_NUMERICAL) == 3);
  EXPECT(tb_exit_code(TB_OK) == 0);

  EXPECT(tb_config_set(cfg, "grid1d-n-side", "96") == TB_OK);
  EXPECT(tb_config_set(cfg, "out_dir", out) == TB_OK);
  char* text = NULL;
  EXPECT(tb_config_to_json(cfg, &text) == TB_OK);
  EXPECT(text && strstr(text, "\"grid1d_n_side\": 96") != NULL);
  tb_config* again = NULL;
  EXPECT(tb_config_from_text(text, &again) == TB_OK);
  tb_string_free(text);
  tb_config_free(again);

  EXPECT(tb_config_from_text("{\"nope\": 1}", &again) == TB_ERR_CONFIG);
  EXPECT(tb_config_from_file("/nonexistent/config.json", &again) != TB_OK);

  double v = 0.0;
  EXPECT(tb_phase_mismatch_angle(795e-9, 12e-3, &v) == TB_OK);
  EXPECT(fabs(v - 8.14) < 0.01);
  EXPECT(tb_mode_count_estimate(7.0, 8.0, 1.2, &v) == TB_OK);
  EXPECT(v >= 100.0 && v <= 130.0);
  EXPECT(tb_phase_mismatch_angle(795e-9, 12e-3, NULL) == TB_ERR_INVALID_ARGUMENT);

  tb_amplifier* amp = NULL;
  EXPECT(tb_amplifier_build(cfg, TB_POLAR_CUT, &amp) == TB_OK);
  size_t rank = 0;
  double smax = 0.0, gain = 0.0, db = 0.0;
  EXPECT(tb_amplifier_schmidt(amp, &rank, &smax) == TB_OK);
  EXPECT(rank > 1 && smax > 0.0);
  EXPECT(tb_amplifier_gain(amp, 7.0, 0.0, 1.5, &gain) == TB_OK);
  EXPECT(fabs(gain - 4.5) < 1e-6);
  EXPECT(tb_amplifier_difference_noise_db(amp, 7.0, 0.0, 1.5, 0.9, &db) == TB_OK);
  EXPECT(db < -6.0 && db > -7.5);
  EXPECT(tb_amplifier_gain(amp, 7.0, 0.0, -1.0, &gain) == TB_ERR_INVALID_ARGUMENT);
  tb_amplifier_free(amp);

  EXPECT(tb_subcommand_count() == 7);
  EXPECT(tb_subcommand_name(99) == NULL);
  EXPECT(tb_run(cfg, "no-such-experiment") == TB_ERR_INVALID_ARGUMENT);
  EXPECT(tb_run(cfg, "oracle-verify") == TB_OK);
  tb_config_free(cfg);

  if (failures) fprintf(stderr, "%d failure(s)\n", failures);
  else printf("capi: all checks passed\n");
  return failures ? 1 : 0;
}
