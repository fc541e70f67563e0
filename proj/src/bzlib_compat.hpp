#pragma once

// Minimal bzlib declarations, matching the library's long-stable ABI, for
// environments that ship libbz2 without its dev header.

extern "C" {

typedef struct {
  char *next_in;
  unsigned int avail_in;
  unsigned int total_in_lo32;
  unsigned int total_in_hi32;

  char *next_out;
  unsigned int avail_out;
  unsigned int total_out_lo32;
  unsigned int total_out_hi32;

  void *state;

  void *(*bzalloc)(void *, int, int);
  void (*bzfree)(void *, void *);
  void *opaque;
} bz_stream;

#define BZ_OK 0
#define BZ_RUN 0
#define BZ_FINISH 2
#define BZ_RUN_OK 1
#define BZ_FINISH_OK 3
#define BZ_STREAM_END 4

int BZ2_bzDecompressInit(bz_stream *strm, int verbosity, int small);
int BZ2_bzDecompress(bz_stream *strm);
int BZ2_bzDecompressEnd(bz_stream *strm);

int BZ2_bzCompressInit(bz_stream *strm, int blockSize100k, int verbosity, int workFactor);
int BZ2_bzCompress(bz_stream *strm, int action);
int BZ2_bzCompressEnd(bz_stream *strm);

}  // extern "C"
