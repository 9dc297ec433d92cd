/* IQNet JND prefiltering toolkit - public C API.
 *
 * All entry points return iqn_status; IQN_OK is 0. On failure a
 * thread-local message is available via iqn_last_error(). Objects returned
 * through out-parameters are owned by the caller and released with the
 * matching *_free function. Strings returned through char** are released
 * with iqn_string_free().
 *
 * Structured options are passed as JSON text; the schema is documented in
 * the project README and mirrors the CLI flags.
 */
#ifndef IQNET_IQNET_H
#define IQNET_IQNET_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define IQN_API __declspec(dllexport)
#else
#define IQN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum iqn_status {
  IQN_OK = 0,
  IQN_E_IO = 1,
  IQN_E_PARSE = 2,
  IQN_E_DIMENSION = 3,
  IQN_E_TILING = 4,
  IQN_E_CONFIG = 5,
  IQN_E_SELECTION = 6,
  IQN_E_MISSING_SCORE = 7,
  IQN_E_EXTERNAL_CODEC = 8,
  IQN_E_MODEL_FORMAT = 9,
  IQN_E_INVALID_ARGUMENT = 10,
  IQN_E_INTERNAL = 11
} iqn_status;

typedef struct iqn_image_s iqn_image;
typedef struct iqn_model_s iqn_model;
typedef struct iqn_scores_s iqn_scores;

IQN_API const char* iqn_version(void);
IQN_API const char* iqn_status_name(iqn_status status);
/* Message describing the most recent failure on this thread. */
IQN_API const char* iqn_last_error(void);
IQN_API void iqn_string_free(char* s);

/* ---- images ------------------------------------------------------- */

/* format: "pgm", "i420", "y4m", or NULL to infer from the extension.
 * width/height are required for i420; frame_index selects a Y4M frame. */
IQN_API iqn_status iqn_image_load(const char* path, const char* format, int width, int height,
                                  int frame_index, iqn_image** out);
IQN_API iqn_status iqn_image_save(const iqn_image* img, const char* path, const char* format);
IQN_API iqn_status iqn_image_from_luma(const uint8_t* luma, int width, int height,
                                       iqn_image** out);
IQN_API void iqn_image_free(iqn_image* img);
IQN_API int iqn_image_width(const iqn_image* img);
IQN_API int iqn_image_height(const iqn_image* img);
IQN_API int iqn_image_has_chroma(const iqn_image* img);
/* Borrowed pointer to width*height luma samples, valid while img lives. */
IQN_API const uint8_t* iqn_image_luma(const iqn_image* img);

/* ---- fidelity metrics --------------------------------------------- */

IQN_API iqn_status iqn_mae(const iqn_image* a, const iqn_image* b, double* out);
/* Luma PSNR in dB; identical planes report +infinity. */
IQN_API iqn_status iqn_psnr(const iqn_image* a, const iqn_image* b, double* out);
IQN_API iqn_status iqn_blockiness(const iqn_image* img, double* out);

/* ---- JND prefilter and codec --------------------------------------- */

/* options_json may be NULL or "{}" for defaults; alpha overrides the
 * config's scale factor. */
IQN_API iqn_status iqn_prefilter(const iqn_image* img, const char* options_json, double alpha,
                                 iqn_image** out);

/* codec_json: {"id":"surrogate","qp":27} or
 * {"id":"external","qp":27,"command":["enc","{in}","{out}","{qp}"]}. */
IQN_API iqn_status iqn_encode(const iqn_image* img, const char* codec_json, iqn_image** recon,
                              uint64_t* bits);

/* ---- IQA ------------------------------------------------------------ */

IQN_API iqn_status iqn_iqa_proxy_score(const iqn_image* patch, double* out);
/* CSV with header image_id,patch_x,patch_y,candidate,score. duplicates
 * (last wins) are counted into *duplicate_count when non-NULL. */
IQN_API iqn_status iqn_scores_load(const char* csv_path, iqn_scores** out, int* duplicate_count);
IQN_API void iqn_scores_free(iqn_scores* scores);

/* ---- dataset generation --------------------------------------------- */

/* Runs the five-step flow on one image. scores may be NULL to use the
 * built-in proxy. records_json receives the per-patch selection records. */
IQN_API iqn_status iqn_generate_training_image(const iqn_image* img, const char* image_id,
                                               const char* options_json, const iqn_scores* scores,
                                               iqn_image** out, char** records_json);

/* Directory-level run; options_json requires "in_dir" and "out_dir", plus
 * optional "qp", "alphas", "iqa", "codec", "jnd". Writes training images and
 * manifest.json, returns a summary. */
IQN_API iqn_status iqn_gen_dataset_run(const char* options_json, char** summary_json);

/* ---- model ----------------------------------------------------------- */

IQN_API iqn_status iqn_model_load(const char* path, iqn_model** out);
IQN_API iqn_status iqn_model_save(const iqn_model* model, const char* path);
IQN_API void iqn_model_free(iqn_model* model);
/* {"channels":16,"parameters":3153,"macs_per_pixel":3104} */
IQN_API iqn_status iqn_model_info(const iqn_model* model, char** info_json);
IQN_API iqn_status iqn_model_apply(const iqn_model* model, const iqn_image* img, iqn_image** out);

/* Trains from a gen-dataset manifest. options_json requires "manifest" and
 * "dataset_dir"; optional "train" block mirrors the TrainConfig schema.
 * log_json receives the per-step loss curve when non-NULL. */
IQN_API iqn_status iqn_train_run(const char* options_json, iqn_model** out, char** log_json);

/* ---- evaluation ------------------------------------------------------- */

/* options_json requires "corpus_dir" and "model"; optional "qps" (array),
 * "codec", "jobs", "out_csv", "out_json". Returns the report as JSON. */
IQN_API iqn_status iqn_eval_run(const char* options_json, char** report_json);

/* Canonical 16-hex-digit hash of a JSON options object, for replay lines. */
IQN_API iqn_status iqn_config_hash(const char* options_json, char** hash);

#ifdef __cplusplus
}
#endif

#endif /* IQNET_IQNET_H */
