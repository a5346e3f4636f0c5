#ifndef TWINBEAM_H
#define TWINBEAM_H

/* C interface to the twin-beam simulator.
 *
 * Every call returns a tb_status. On failure, tb_last_error() holds a message
 * for the calling thread until its next failing call. Objects are opaque and
 * released with their matching *_free function; strings returned through
 * char** are released with tb_string_free. Angles are in mrad unless a name
 * says otherwise. */

#include <stddef.h>

#if defined(_WIN32)
#define TB_API __declspec(dllexport)
#else
#define TB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tb_status {
  TB_OK = 0,
  TB_ERR_INVALID_ARGUMENT = 1,
  TB_ERR_NUMERICAL = 2,
  TB_ERR_TRUNCATION = 3,
  TB_ERR_UNDEFINED_Q = 4,
  TB_ERR_UNDEFINED_FRINGES = 5,
  TB_ERR_INCONSISTENT_WIDTHS = 6,
  TB_ERR_AMBIGUOUS = 7,
  TB_ERR_CONFIG = 8,
  TB_ERR_IO = 9,
  TB_ERR_INTERNAL = 10
} tb_status;

typedef enum tb_geometry {
  TB_POLAR_CUT = 0,
  TB_AZIMUTHAL_CUT = 1,
  TB_PLANE = 2
} tb_geometry;

typedef struct tb_config tb_config;
typedef struct tb_amplifier tb_amplifier;

TB_API const char* tb_last_error(void);
TB_API const char* tb_status_name(tb_status status);
/* Process exit status: 0 ok, 2 validation, 3 numerical, 1 other. */
TB_API int tb_exit_code(tb_status status);
TB_API void tb_string_free(char* s);

/* Configuration. */
TB_API tb_status tb_config_default(tb_config** out);
TB_API tb_status tb_config_from_text(const char* json_text, tb_config** out);
TB_API tb_status tb_config_from_file(const char* path, tb_config** out);
TB_API tb_status tb_config_set(tb_config* cfg, const char* key, const char* value);
TB_API tb_status tb_config_to_json(const tb_config* cfg, char** out);
TB_API void tb_config_free(tb_config* cfg);
TB_API size_t tb_config_key_count(void);
TB_API const char* tb_config_key_name(size_t index);

/* Experiments. Outputs go to the config's out_dir. */
TB_API size_t tb_subcommand_count(void);
TB_API const char* tb_subcommand_name(size_t index);
TB_API tb_status tb_run(const tb_config* cfg, const char* subcommand);

/* Closed-form helpers. */
TB_API tb_status tb_phase_mismatch_angle(double wavelength_m, double cell_length_m,
                                         double* theta_m_mrad);
TB_API tb_status tb_mode_count_estimate(double theta0, double delta_theta, double theta_c,
                                        double* total);

/* Calibrated amplifier. */
TB_API tb_status tb_amplifier_build(const tb_config* cfg, tb_geometry geometry,
                                    tb_amplifier** out);
TB_API void tb_amplifier_free(tb_amplifier* amp);
TB_API tb_status tb_amplifier_scale(const tb_amplifier* amp, double* s0);
TB_API tb_status tb_amplifier_schmidt(const tb_amplifier* amp, size_t* rank,
                                      double* s_max);
/* Gaussian probe seed centered at (x, y) with the given waist. */
TB_API tb_status tb_amplifier_gain(const tb_amplifier* amp, double x, double y,
                                   double waist, double* gain);
TB_API tb_status tb_amplifier_difference_noise_db(const tb_amplifier* amp, double x,
                                                  double y, double waist, double eta,
                                                  double* noise_db);

#ifdef __cplusplus
}
#endif

#endif
