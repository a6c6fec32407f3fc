/// <reference types="vitest" />
import { defineConfig } from "vite";

export default defineConfig({
  server: {
    proxy: {
      // dev server forwards API calls to the running vulntrust service
      "/api": "http://127.0.0.1:8321",
    },
  },
  test: {
    environment: "jsdom",
  },
});
